"""Momentum scaling degree: zooming test functions onto a submanifold of momentum space.

``phi_gamma(p) = gamma^m psi(gamma rho(p)) chi(sigma(p))`` concentrates on the
zero set of the chart coordinates ``rho``.  The degree of an object is read off
as minus the log-log slope of its response to ``phi_gamma``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .spacetime import TWO_PI, DiscreteMeasure
from .toymodel.fields import OperatorField, operator_norm, right_weighted
from .toymodel.spectrum import QuantumModel, mass_shell_model
from .toymodel.weights import EnergyWeight

UNDERFLOW = 1e-13
STABILITY_TOL = 0.1
MONOTONE_TOL = 0.2


class ChartDomainError(ValueError):
    """The test function support leaves the chart neighbourhood."""


# --- profiles -----------------------------------------------------------------------------------


def bump(u, radius: float = 1.0) -> np.ndarray:
    """exp(1 - 1/(1 - (u/r)^2)) on |u| < r, normalised to 1 at the centre."""
    x = np.asarray(u, dtype=float) / radius
    inside = np.abs(x) < 1
    safe = np.where(inside, x, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe**2)), 0.0)


def bump_derivative(order: int, u: float, radius: float = 1.0, h: float = 1e-2) -> float:
    """order-th derivative of :func:`bump` by a 9-point central stencil."""
    if order == 0:
        return float(bump(u, radius))
    offsets = np.arange(-4, 5)
    # exact finite-difference weights on the stencil (Fornberg via Vandermonde solve)
    vander = np.vander(offsets.astype(float), increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    w = np.linalg.solve(vander, rhs)
    return float(w @ bump(u + offsets * h, radius) / h**order)


@dataclass(frozen=True)
class Profile:
    """Product bump ``psi(rho) = prod_i bump(rho_i - shift, radius)``.

    The shift keeps odd derivatives at the origin nonzero.
    """

    radius: float = 1.0
    shift: float = 0.3

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return np.prod(bump(rho - self.shift, self.radius), axis=-1)

    def describe(self) -> dict:
        return {"kind": "shifted-bump", "radius": self.radius, "shift": self.shift}


# --- charts -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialChart:
    """Local coordinates on momentum space.

    Each ``rho`` component is a polynomial in (p0, p1, p2, p3) given as a
    mapping from exponent tuples to coefficients; ``sigma`` is a subset of
    the Minkowski components.
    """

    rho: tuple
    sigma: tuple = ()

    def __post_init__(self):
        if not 1 <= len(self.rho) <= 4:
            raise ValueError("codimension must be between 1 and 4")
        if len(self.rho) + len(self.sigma) != 4:
            raise ValueError("rho and sigma together must give four coordinates")

    @property
    def codim(self) -> int:
        return len(self.rho)

    def rho_of(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = []
        for poly in self.rho:
            val = np.zeros(p.shape[:-1])
            for expo, coef in poly.items():
                term = np.full(p.shape[:-1], float(coef))
                for mu, e in enumerate(expo):
                    if e:
                        term = term * p[..., mu] ** e
                val = val + term
            out.append(val)
        return np.stack(out, axis=-1)

    def sigma_of(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return p[..., list(self.sigma)] if self.sigma else np.zeros(p.shape[:-1] + (0,))

    def to_json(self) -> dict:
        return {"rho": [{",".join(map(str, k)): v for k, v in poly.items()} for poly in self.rho],
                "sigma": list(self.sigma)}

    @classmethod
    def from_json(cls, data) -> "PolynomialChart":
        rho = tuple({tuple(int(e) for e in k.split(",")): float(v) for k, v in poly.items()} for poly in data["rho"])
        return cls(rho, tuple(int(s) for s in data.get("sigma", ())))


def mass_shell_chart(mass: float, scale: float = 1.0) -> PolynomialChart:
    """rho = scale (p.p - mass^2), sigma = spatial momentum."""
    poly = {(2, 0, 0, 0): scale, (0, 2, 0, 0): -scale, (0, 0, 2, 0): -scale, (0, 0, 0, 2): -scale,
            (0, 0, 0, 0): -scale * mass**2}
    return PolynomialChart((poly,), (1, 2, 3))


def mass_shell_chart_quadratic(mass: float, a: float = 2.0, b: float = 1.0) -> PolynomialChart:
    """rho = a s + b s^2 with s = p.p - mass^2: a second chart for the same shell."""
    s = {(2, 0, 0, 0): 1.0, (0, 2, 0, 0): -1.0, (0, 0, 2, 0): -1.0, (0, 0, 0, 2): -1.0, (0, 0, 0, 0): -mass**2}
    poly: dict = {}
    for k, v in s.items():
        poly[k] = poly.get(k, 0.0) + a * v
    for (k1, v1) in s.items():
        for (k2, v2) in s.items():
            key = tuple(x + y for x, y in zip(k1, k2))
            poly[key] = poly.get(key, 0.0) + b * v1 * v2
    return PolynomialChart((poly,), (1, 2, 3))


def flat_chart(q, codim: int) -> PolynomialChart:
    """rho_i = p_i - q_i for the first ``codim`` components."""
    q = np.asarray(q, dtype=float)
    rho = []
    for mu in range(codim):
        expo = [0, 0, 0, 0]
        expo[mu] = 1
        rho.append({tuple(expo): 1.0, (0, 0, 0, 0): -float(q[mu])})
    return PolynomialChart(tuple(rho), tuple(range(codim, 4)))


@dataclass(frozen=True)
class ScalingFamily:
    """Test functions ``gamma^m psi(gamma rho) chi(sigma)`` around the base point q.

    ``chi`` is a unit-mass bump of radius ``sigma_radius`` centred at
    sigma(q); ``window`` is the radius of the chart neighbourhood U in sigma.
    """

    q: tuple
    chart: PolynomialChart
    psi: Profile = Profile()
    sigma_radius: float = 0.5
    window: float = 1.0

    def __post_init__(self):
        if self.sigma_radius > self.window:
            raise ChartDomainError("sigma support escapes the chart neighbourhood")
        if np.any(np.abs(self.chart.rho_of(np.asarray(self.q, dtype=float))) > 1e-9):
            raise ChartDomainError("base point does not lie on the zero set of rho")

    @property
    def m(self) -> int:
        return self.chart.codim

    def chi(self, sigma) -> np.ndarray:
        s0 = self.chart.sigma_of(np.asarray(self.q, dtype=float))
        sigma = np.asarray(sigma, dtype=float)
        if s0.size == 0:
            return np.ones(sigma.shape[:-1])
        r = np.linalg.norm(sigma - s0, axis=-1)
        return bump(r, self.sigma_radius) / _bump_mass(len(s0), self.sigma_radius)

    def __call__(self, p, gamma: float) -> np.ndarray:
        if gamma < 1:
            raise ValueError("gamma must be at least 1")
        p = np.asarray(p, dtype=float)
        rho = self.chart.rho_of(p)
        return gamma**self.m * self.psi(gamma * rho) * self.chi(self.chart.sigma_of(p))

    def describe(self) -> dict:
        return {"q": list(self.q), "chart": self.chart.to_json(), "psi": self.psi.describe(),
                "sigma_radius": self.sigma_radius, "window": self.window}


@lru_cache(maxsize=32)
def _bump_mass(dim: int, radius: float) -> float:
    """int bump(|s|) d^dim s."""
    if dim == 0:
        return 1.0
    surface = 2 * np.pi ** (dim / 2) / math.gamma(dim / 2)
    val = integrate.quad(lambda r: float(bump(r, radius)) * r ** (dim - 1), 0, radius)[0]
    return surface * val


def scaled_test(family: ScalingFamily, gamma: float, model: QuantumModel) -> np.ndarray:
    """phi_hat_gamma at every transfer p_m - p_n of ``model``."""
    return family(model.transfers(), gamma)


# --- estimator ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeEstimate:
    degree: float
    slope_last: float
    slope_full: float
    gammas: tuple
    values: tuple
    underflow: bool = False

    @property
    def stable(self) -> bool:
        if self.underflow:
            return True
        return abs(self.slope_last - self.slope_full) < STABILITY_TOL

    def to_json(self) -> dict:
        return {"degree": _json_float(self.degree), "slope_last": _json_float(self.slope_last),
                "slope_full": _json_float(self.slope_full), "stable": self.stable, "underflow": self.underflow,
                "gamma": list(self.gammas), "value": list(self.values)}


def _json_float(x: float):
    return x if np.isfinite(x) else ("inf" if x > 0 else "-inf")


def gamma_grid(gmax: float = 1e3, n: int = 12, gmin: float = 1.0) -> np.ndarray:
    return np.geomspace(gmin, gmax, n)


def estimate_degree(evaluator: Callable[[float], float], gammas=None) -> DegreeEstimate:
    """Degree = -slope of log|value| against log gamma over the last half of the grid."""
    g = gamma_grid() if gammas is None else np.asarray(gammas, dtype=float)
    if g.size < 6:
        raise ValueError("gamma grid needs at least 6 points")
    ratios = g[1:] / g[:-1]
    if np.any(g < 1) or not np.allclose(ratios, ratios[0], rtol=1e-9):
        raise ValueError("gamma grid must be geometric and start at or above 1")
    vals = np.array([abs(evaluator(float(x))) for x in g])
    half = g.size // 2
    tail = vals[g.size - half - (g.size % 2):]
    if np.any(tail < UNDERFLOW):
        return DegreeEstimate(float("inf"), float("-inf"), float("-inf"), tuple(g.tolist()), tuple(vals.tolist()), True)
    logg, logv = np.log(g), np.log(np.maximum(vals, np.finfo(float).tiny))
    start = g.size - half - (g.size % 2)
    slope_last = float(np.polyfit(logg[start:], logv[start:], 1)[0])
    slope_full = float(np.polyfit(logg, logv, 1)[0])
    return DegreeEstimate(-slope_last, slope_last, slope_full, tuple(g.tolist()), tuple(vals.tolist()))


# --- distribution evaluators --------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaCombination:
    """T = sum_l c_l d^l delta in m variables, derivatives along the first coordinate."""

    m: int
    terms: tuple = ((0, 1.0),)

    def __post_init__(self):
        if not 1 <= self.m <= 4:
            raise ValueError("m must be between 1 and 4")
        if not self.terms:
            raise ValueError("delta combination needs at least one term")
        if any(l < 0 for l, _ in self.terms):
            raise ValueError("derivative orders must be non-negative")

    @property
    def max_order(self) -> int:
        return max(l for l, c in self.terms if c != 0)

    @property
    def analytic_degree(self) -> float:
        return -self.m - self.max_order

    def evaluate(self, gamma: float, psi: Profile = Profile()) -> float:
        """T(psi_gamma) with psi_gamma(rho) = gamma^m psi(gamma rho)."""
        rest = float(bump(-psi.shift, psi.radius)) ** (self.m - 1)
        total = 0.0
        for l, c in self.terms:
            d = bump_derivative(l, -psi.shift, psi.radius)
            total += c * (-1) ** l * gamma ** (self.m + l) * d * rest
        return total

    def evaluator(self, psi: Profile = Profile()) -> Callable[[float], float]:
        return lambda g: self.evaluate(g, psi)


@dataclass(frozen=True)
class Homogeneous:
    """T(rho) = scale |rho|^a in m variables (a > -m), integrated radially in rho."""

    a: float
    m: int = 1
    scale: float = 1.0

    def __post_init__(self):
        if not self.a > -self.m:
            raise ValueError("|rho|^a is locally integrable only for a > -m")

    def evaluate(self, gamma: float, psi_radial: Callable = None, radius: float = 1.0) -> float:
        """int |rho|^a gamma^m psi(gamma |rho|) d^m rho by quadrature in rho (not in gamma rho)."""
        prof = psi_radial if psi_radial is not None else (lambda u: float(bump(u, radius)))
        surface = 2 * np.pi ** (self.m / 2) / math.gamma(self.m / 2)
        upper = radius / gamma
        f = lambda r: gamma**self.m * prof(gamma * r)  # noqa: E731
        val = integrate.quad(f, 0.0, upper, weight="alg", wvar=(self.a + self.m - 1, 0.0), limit=200)[0]
        return self.scale * surface * val

    def evaluator(self, radius: float = 1.0) -> Callable[[float], float]:
        return lambda g: self.evaluate(g, radius=radius)


# --- operator evaluators ------------------------------------------------------------------------


def smeared_by_family(b: OperatorField, family: ScalingFamily, gamma: float) -> np.ndarray:
    """B(phi_gamma) = (2 pi)^2 phi_hat_gamma(q_mn) B_mn."""
    return b.matrix * TWO_PI**2 * scaled_test(family, gamma, b.model)


def operator_evaluator(b: OperatorField, family: ScalingFamily,
                       weight: EnergyWeight | None = None) -> Callable[[float], float]:
    """gamma -> ||B(phi_gamma)|| or ||B(phi_gamma) G(P0)||."""
    g = None if weight is None else np.asarray(weight(b.model.energies), dtype=float)

    def ev(gamma: float) -> float:
        a = smeared_by_family(b, family, gamma)
        return operator_norm(a if g is None else right_weighted(a, g))

    return ev


def trace_evaluator(b: OperatorField, family: ScalingFamily, density: np.ndarray,
                    weight: EnergyWeight | None = None) -> Callable[[float], float]:
    """gamma -> |Tr(rho B(phi_gamma) G(P0))|, a norm-continuous functional on matrices."""
    g = np.ones(b.model.dim) if weight is None else np.asarray(weight(b.model.energies), dtype=float)

    def ev(gamma: float) -> float:
        a = right_weighted(smeared_by_family(b, family, gamma), g)
        return abs(np.trace(density @ a))

    return ev


# --- bounds and classification ------------------------------------------------------------------


def degree_lower_bounds(m: int, kappa: float | None = None, q_is_zero: bool = False) -> float:
    """Lower bound on the degree: bare bounded operators, or commutators of kappa type at q != 0."""
    if m not in (1, 2, 3, 4):
        raise ValueError("m must be 1, 2, 3 or 4")
    if kappa is None:
        return -(m + 4) / 2
    if q_is_zero:
        raise ValueError("the kappa-type bound requires q != 0")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return -(m + 4 - kappa) / 2 if kappa < 3 else -(m + 1) / 2


@dataclass(frozen=True, order=True)
class Singularity:
    m: int
    l: int
    at_zero: bool = False

    def to_json(self) -> dict:
        return {"m": self.m, "l": self.l, "at_zero": self.at_zero}


def allowed(m: int, l: int, kappa: float) -> bool:
    """m + 2l <= 1 (kappa >= 3) or m + 2l <= 4 - kappa (kappa < 3); equality allowed."""
    bound = 1.0 if kappa >= 3 else 4.0 - kappa
    return m + 2 * l <= bound + 1e-12


def classify_allowed_singularities(kappa: float, max_order: int = 3) -> list[Singularity]:
    """Delta-type singularities not excluded for a commutator of kappa type, sorted by (m, l)."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    out = [Singularity(4, 0, True)]
    for m in range(1, 5):
        for l in range(max_order + 1):
            if allowed(m, l, kappa):
                out.append(Singularity(m, l))
    return sorted(out, key=lambda s: (s.m, s.l, s.at_zero))


@dataclass(frozen=True)
class MonotonicityResult:
    before: DegreeEstimate
    after: DegreeEstimate
    tolerance: float = MONOTONE_TOL

    @property
    def passed(self) -> bool:
        return self.after.degree >= self.before.degree - self.tolerance

    def to_json(self) -> dict:
        return {"before": self.before.to_json(), "after": self.after.to_json(), "tolerance": self.tolerance,
                "passed": self.passed}


def remark_monotonicity_check(b: OperatorField, nu, family: ScalingFamily, gammas=None,
                              weight: EnergyWeight | None = None) -> MonotonicityResult:
    """Smearing by a finite measure does not lower the estimated degree."""
    before = estimate_degree(operator_evaluator(b, family, weight), gammas)
    after = estimate_degree(operator_evaluator(b.smear(nu), family, weight), gammas)
    return MonotonicityResult(before, after)


def cancelling_measure(transfer) -> DiscreteMeasure:
    """delta_0 - delta_a with a.transfer = 0 exactly, so the transform vanishes at the transfer.

    a = (q1, q0, 0, 0) makes q0 q1 - q1 q0 vanish in floating point as well,
    which a phase of 2 pi would not.
    """
    t = np.asarray(transfer, dtype=float)
    a = np.array([t[1], t[0], 0.0, 0.0])
    if not np.any(a):
        a = np.array([0.0, 0.0, 0.0, 1.0])
    return DiscreteMeasure(np.vstack([np.zeros(4), a]), [1.0, -1.0])


# --- engineered models --------------------------------------------------------------------------


@dataclass(frozen=True)
class EngineeredShell:
    """Vacuum plus on-shell and off-shell states; B maps the vacuum onto each of them."""

    field: OperatorField
    mass: float
    on_shell: tuple
    off_shell: tuple
    details: dict = field(default_factory=dict)

    @property
    def model(self) -> QuantumModel:
        return self.field.model


def engineered_shell_model(mass: float = 1.0, on_momenta=((0.0, 0.0, 0.0), (0.3, 0.0, 0.0)),
                           off_momenta=((0.1, 0.1, 0.0), (-0.4, 0.2, 0.0)), off_gap: float = 0.25,
                           amplitudes=None) -> EngineeredShell:
    """Bohr transfers p_i - 0 land on the shell p.p = mass^2 for the on-shell states only."""
    on = np.asarray(on_momenta, dtype=float).reshape(-1, 3)
    off = np.asarray(off_momenta, dtype=float).reshape(-1, 3)
    shell = mass_shell_model(mass, np.vstack([on, off]), include_vacuum=True)
    spec = shell.spectrum.copy()
    spec[1 + on.shape[0]:, 0] += off_gap
    model = QuantumModel(spec, "engineered-shell")
    d = model.dim
    amps = np.ones(d - 1) if amplitudes is None else np.asarray(amplitudes, dtype=complex)
    b = np.zeros((d, d), dtype=complex)
    b[1:, 0] = amps
    return EngineeredShell(OperatorField(model, b), mass, tuple(map(tuple, on)), tuple(map(tuple, off)),
                           {"off_gap": off_gap})


def shell_point(mass: float, momentum) -> np.ndarray:
    k = np.asarray(momentum, dtype=float)
    return np.array([np.sqrt(mass**2 + k @ k), *k])
