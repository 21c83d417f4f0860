# =====================================================
# Closed-form exponents and constants
# β, q′, q_c, λ_{N,q}, q*, Λ_{N,q}, C_KO(q), γ_eq
# =====================================================

from dataclasses import asdict, dataclass

import numpy as np

from core.errors import ExponentOutOfRange, QOutOfRange

OBSTRUCTION_SLACK = 1e-12


@dataclass(frozen=True)
class ExponentPack:
    N: int
    q: float
    beta: float
    q_conj: float
    q_c: float
    lambda_coeff: float
    q_star: float

    @property
    def subcritical(self) -> bool:
        return self.q < self.q_c

    def to_json(self) -> dict:
        return asdict(self)


def _check_range(N: int, q: float):
    if int(N) != N or N < 2:
        raise QOutOfRange(f"[ERROR] dimension must be an integer >= 2, got {N}")
    if not 1.0 < q < 2.0:
        raise QOutOfRange(f"[ERROR] q must lie in (1, 2), got {q}")


def exponents(N: int, q: float) -> ExponentPack:
    _check_range(N, q)
    q = float(q)
    beta = (2.0 - q) / (q - 1.0)
    q_conj = q / (q - 1.0)
    return ExponentPack(
        N=int(N),
        q=q,
        beta=beta,
        q_conj=q_conj,
        q_c=(N + 1.0) / N,
        lambda_coeff=beta * (q_conj - N),
        q_star=N / (N - 1.0),
    )


def radial_constant(N: int, q: float) -> float:
    """Λ_{N,q} of the radial singular solution U_S = Λ|x|^{−β} of −ΔU + |∇U|^q = 0 in ℝ^N \\ {0}."""

    pack = exponents(N, q)
    if q >= pack.q_star:
        raise ExponentOutOfRange(
            f"[ERROR] radial singular solution needs q < N/(N-1) = {pack.q_star:g}, got q = {q}"
        )

    base = ((q - 1.0) / (2.0 - q)) ** pack.q_conj
    tail = ((2.0 - q) * (N - (N - 1.0) * q) / (q - 1.0) ** 2) ** (1.0 / (q - 1.0))
    return float(base * tail)


def radial_singular_residual(N: int, q: float, radii, factor: float = 1.0) -> float:
    """
    sup over radii of |−ΔU + |∇U|^q| for U = factor·Λ|x|^{−β}, each term
    normalised by the larger of the two.
    """

    pack = exponents(N, q)
    lam = factor * radial_constant(N, q)
    r = np.asarray(radii, dtype=float)
    beta = pack.beta

    laplacian = lam * beta * (beta + 2.0 - N) * r ** (-beta - 2.0)
    absorption = (lam * beta) ** q * r ** (-(beta + 1.0) * q)

    scale = np.maximum(np.abs(laplacian), np.abs(absorption))
    return float(np.max(np.abs(absorption - laplacian) / scale))


def keller_osserman_constant(q: float) -> float:
    """C_KO(q) in u ≤ C_KO(q)|x|^{(q−2)/(q−1)}."""
    if not 1.0 < q < 2.0:
        raise QOutOfRange(f"[ERROR] q must lie in (1, 2), got {q}")
    return float((q - 1.0) ** ((q - 2.0) / (q - 1.0)) / (2.0 - q))


def envelope_constant(N: int, q: float) -> float:
    """max(Λ_{N,q}, C_KO(q)); C_KO alone once Λ is undefined."""
    ko = keller_osserman_constant(q)
    try:
        return max(radial_constant(N, q), ko)
    except ExponentOutOfRange:
        return ko


def existence_obstruction(N: int, q: float) -> bool:
    """True iff N−1 ≥ λ_{N,q}, i.e. no positive profile exists (q ≥ q_c)."""
    pack = exponents(N, q)
    return bool(N - 1.0 >= pack.lambda_coeff - OBSTRUCTION_SLACK)


def supersolution_height(N: int, q: float) -> float:
    """Constant equilibrium γ_eq = (λ/β^q)^{1/(q−1)} of the profile equation; 0 when λ ≤ 0."""
    pack = exponents(N, q)
    if pack.lambda_coeff <= 0:
        return 0.0
    return float((pack.lambda_coeff / pack.beta ** q) ** (1.0 / (q - 1.0)))
