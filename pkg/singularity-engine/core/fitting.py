"""
Small fitting helpers shared by the trace, lab and suite code:
log-log trend fits, polynomial extrapolation to zero and
observed convergence orders.
"""

import numpy as np
from scipy import stats


def loglog_fit(x, y) -> dict:
    """
    Least-squares fit of log|y| against log x.
    Returns slope, intercept and R² (R² is 1.0 for an exact line).
    """

    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    mask = (x > 0) & (y > 0) & np.isfinite(y)

    if mask.sum() < 2:
        return {"slope": float("nan"), "intercept": float("nan"), "r2": 0.0}

    lx, ly = np.log(x[mask]), np.log(y[mask])

    if np.ptp(ly) == 0.0:
        return {"slope": 0.0, "intercept": float(ly[0]), "r2": 1.0}

    fit = stats.linregress(lx, ly)

    return {
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r2": float(fit.rvalue ** 2),
    }


def extrapolate_to_zero(h, values, degree: int = 2) -> float:
    """Polynomial (Richardson-style) extrapolation of values(h) to h = 0."""

    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=float)
    degree = min(degree, len(h) - 1)

    if degree < 1:
        return float(values[-1])

    coeffs = np.polyfit(h, values, degree)
    return float(np.polyval(coeffs, 0.0))


def convergence_orders(h, errors) -> list:
    """Observed orders log(e_k/e_{k+1}) / log(h_k/h_{k+1})."""

    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)

    return [
        float(np.log(errors[k] / errors[k + 1]) / np.log(h[k] / h[k + 1]))
        for k in range(len(h) - 1)
    ]


def relative_change(old, new, floor: float = 1e-300) -> float:
    scale = max(abs(new), abs(old), floor)
    return abs(new - old) / scale
