# =====================================================
# Absorption laws g(|∇u|)
# Power(q), TruncatedPower(q, M), Custom(sample table)
# =====================================================

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

from core.errors import LawValidationError


class LawKind(str, Enum):
    POWER = "Power"
    TRUNCATED = "TruncatedPower"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class AbsorptionLaw:
    kind: LawKind
    q: float | None = None
    cap: float | None = None
    table_s: tuple = ()
    table_g: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", LawKind(self.kind))

        if self.kind in (LawKind.POWER, LawKind.TRUNCATED):
            if self.q is None or not 1.0 <= float(self.q) <= 2.0:
                raise LawValidationError(f"[ERROR] power laws need q in [1, 2], got {self.q}")
            object.__setattr__(self, "q", float(self.q))

        if self.kind is LawKind.TRUNCATED and (self.cap is None or not self.cap > 0):
            raise LawValidationError(f"[ERROR] truncation cap must be positive, got {self.cap}")

        if self.kind is LawKind.CUSTOM:
            s = np.asarray(self.table_s, dtype=float)
            g = np.asarray(self.table_g, dtype=float)
            if s.size < 2 or s.shape != g.shape:
                raise LawValidationError("[ERROR] custom law needs matching tables of >= 2 samples")
            if s[0] != 0.0 or g[0] != 0.0:
                raise LawValidationError("[ERROR] custom law must start at g(0) = 0")
            if np.any(np.diff(s) <= 0):
                raise LawValidationError("[ERROR] custom law abscissae must be strictly increasing")
            if np.any(np.diff(g) < 0) or not np.all(np.isfinite(g)):
                raise LawValidationError("[ERROR] custom law must be finite and nondecreasing")
            object.__setattr__(self, "table_s", tuple(float(v) for v in s))
            object.__setattr__(self, "table_g", tuple(float(v) for v in g))

    # ---------------- CONSTRUCTORS ----------------

    @classmethod
    def power(cls, q: float) -> "AbsorptionLaw":
        return cls(LawKind.POWER, q=q)

    @classmethod
    def truncated(cls, q: float, cap: float) -> "AbsorptionLaw":
        return cls(LawKind.TRUNCATED, q=q, cap=float(cap))

    @classmethod
    def custom(cls, s, g) -> "AbsorptionLaw":
        return cls(LawKind.CUSTOM, table_s=tuple(s), table_g=tuple(g))

    @classmethod
    def zero(cls) -> "AbsorptionLaw":
        return cls.custom((0.0, 1.0), (0.0, 0.0))

    # ---------------- EVALUATION ----------------

    @property
    def is_zero(self) -> bool:
        return self.kind is LawKind.CUSTOM and not any(self.table_g)

    def _tail_slope(self) -> float:
        s, g = self.table_s, self.table_g
        return (g[-1] - g[-2]) / (s[-1] - s[-2])

    def __call__(self, s) -> np.ndarray:
        s = np.abs(np.asarray(s, dtype=float))

        if self.kind is LawKind.POWER:
            return s ** self.q
        if self.kind is LawKind.TRUNCATED:
            return np.minimum(s ** self.q, self.cap)

        table_s = np.asarray(self.table_s)
        inside = np.interp(s, table_s, self.table_g)
        tail = self.table_g[-1] + self._tail_slope() * (s - table_s[-1])
        return np.where(s > table_s[-1], tail, inside)

    def derivative(self, s) -> np.ndarray:
        """g′(s) (right derivative for tables and at the truncation cap)."""
        s = np.abs(np.asarray(s, dtype=float))

        if self.kind is LawKind.POWER:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(s > 0, self.q * s ** (self.q - 1.0), 0.0 if self.q > 1 else 1.0)
        if self.kind is LawKind.TRUNCATED:
            with np.errstate(divide="ignore", invalid="ignore"):
                slope = np.where(s > 0, self.q * s ** (self.q - 1.0), 0.0 if self.q > 1 else 1.0)
            return np.where(s ** self.q < self.cap, slope, 0.0)

        table_s = np.asarray(self.table_s)
        slopes = np.append(np.diff(self.table_g) / np.diff(table_s), self._tail_slope())
        idx = np.clip(np.searchsorted(table_s, s, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    # ---------------- SUBCRITICALITY ----------------

    def _tail_integral_finite(self, exponent: float) -> bool:
        if self.kind is LawKind.POWER:
            return self.q - exponent < -1.0
        if self.kind is LawKind.TRUNCATED:
            return True
        value, err = quad(lambda s: float(self(s)) * s ** (-exponent), 1.0, np.inf, limit=200)
        return bool(np.isfinite(value) and err <= 1e-6 * max(1.0, abs(value)))

    def subcritical_boundary(self, N: int) -> bool:
        """∫₁^∞ g(s) s^{−(2N+1)/N} ds < ∞."""
        return self._tail_integral_finite((2.0 * N + 1.0) / N)

    def subcritical_interior(self, N: int) -> bool:
        """∫₁^∞ g(s) s^{−(2N−1)/(N−1)} ds < ∞."""
        return self._tail_integral_finite((2.0 * N - 1.0) / (N - 1.0))

    # ---------------- JSON ----------------

    def to_json(self) -> dict:
        payload = {"kind": self.kind.value}
        if self.q is not None:
            payload["q"] = self.q
        if self.cap is not None:
            payload["cap"] = self.cap
        if self.kind is LawKind.CUSTOM:
            payload["s"] = list(self.table_s)
            payload["g"] = list(self.table_g)
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "AbsorptionLaw":
        try:
            kind = LawKind(payload["kind"])
        except (KeyError, ValueError) as exc:
            raise LawValidationError(f"[ERROR] unknown absorption law {payload!r}") from exc

        if kind is LawKind.CUSTOM:
            return cls.custom(payload.get("s", ()), payload.get("g", ()))
        return cls(kind, q=payload.get("q"), cap=payload.get("cap"))

    def __str__(self):
        if self.kind is LawKind.POWER:
            return f"Power({self.q:g})"
        if self.kind is LawKind.TRUNCATED:
            return f"TruncatedPower({self.q:g}, {self.cap:g})"
        return "Zero" if self.is_zero else f"Custom({len(self.table_s)} samples)"
