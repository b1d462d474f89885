"""Non-increasing energy weights G(P0) used on the right of the frequency parts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class EnergyWeight:
    """Scalar weight on [0, inf) with the three admissibility flags.

    ``G(0)`` may be ``inf`` for the minus family; the flags say whether the
    weight is usable on the + side (bounded at 0) or only on the - side.
    """

    func: Callable[[float], float]
    name: str = "G"
    nonincreasing: bool = True
    square_integrable: bool = True
    bounded_at_0: bool = True

    def __call__(self, energy):
        e = np.asarray(energy, dtype=float)
        if np.any(e < 0):
            raise ValueError("energy weights are defined on [0, inf)")
        return self.func(e)

    def admissible(self, variant: str) -> bool:
        base = self.nonincreasing and self.square_integrable
        if variant == "+":
            return base and self.bounded_at_0
        if variant == "-":
            return base
        raise ValueError(f"unknown variant {variant!r}")

    def l2_squared(self) -> float:
        """int_0^inf G(E)^2 dE by adaptive quadrature."""
        f = lambda e: float(self.func(np.asarray(e))) ** 2  # noqa: E731
        head = integrate.quad(f, 0.0, 1.0, limit=200)[0]
        tail = integrate.quad(f, 1.0, np.inf, limit=200)[0]
        return head + tail

    def check_flags(self, e_max: float = 1e3, n: int = 4001) -> dict:
        """Numerical audit of the declared flags on a log grid."""
        e = np.concatenate([[0.0], np.geomspace(1e-8, e_max, n)])
        with np.errstate(divide="ignore"):
            v = np.asarray(self.func(e), dtype=float)
        finite = v[1:]
        mono = bool(np.all(np.diff(finite) <= 1e-12 * np.maximum(1.0, np.abs(finite[:-1]))))
        return {
            "nonincreasing": mono,
            "bounded_at_0": bool(np.isfinite(v[0])),
            "square_integrable": bool(np.isfinite(self.l2_squared())),
        }


def G_plus(s: float, lam: float = 1.0) -> EnergyWeight:
    """(1 + lam E)^{-s}, s > 1/2."""
    if not s > 0.5:
        raise ValueError(f"G_+ needs s > 1/2, got {s}")
    if not lam > 0:
        raise ValueError("lam must be positive")
    return EnergyWeight(lambda e: (1.0 + lam * np.asarray(e, dtype=float)) ** (-s), f"G+(s={s})")


def G_minus(a: float, b: float, lam: float = 1.0) -> EnergyWeight:
    """(lam E)^{-a} (1 + lam E)^{-b}, 0 <= a < 1/2, a + b > 1/2; infinite at 0 when a > 0."""
    if not (0 <= a < 0.5 and a + b > 0.5):
        raise ValueError(f"G_- needs 0 <= a < 1/2 and a + b > 1/2, got a={a}, b={b}")
    if not lam > 0:
        raise ValueError("lam must be positive")

    def g(e):
        e = np.asarray(e, dtype=float)
        with np.errstate(divide="ignore"):
            head = np.where(e > 0, (lam * np.where(e > 0, e, 1.0)) ** (-a), np.inf if a > 0 else 1.0)
        return head * (1.0 + lam * e) ** (-b)

    return EnergyWeight(g, f"G-(a={a},b={b})", bounded_at_0=(a == 0))


def G_t(s: float, lam: float = 1.0) -> EnergyWeight:
    return G_plus(s, lam)


def zero_weight() -> EnergyWeight:
    return EnergyWeight(lambda e: np.zeros_like(np.asarray(e, dtype=float)), "zero")
