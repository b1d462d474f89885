"""Numerical checks of three auxiliary lemmas.

* power-law decay of the inverse transform of a function with a |p|^gamma
  singularity at the origin,
* the interpolation inequality ||h^e f||_s <= ||f||_s^{1-e} ||h f||_s^e,
* monotone integrals against measures ordered by their distribution functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

SLACK = 1e-12


class AliasingError(ValueError):
    """The sampled function has not decayed at the edge of the momentum grid."""


# --- decay of inverse transforms ----------------------------------------------------------------


@dataclass(frozen=True)
class DecayResult:
    constant: float
    window: float
    step: float
    points: int


def inverse_transform_1d(values: np.ndarray, dp: float) -> tuple[np.ndarray, np.ndarray]:
    """(2 pi)^{-1/2} int exp(-i p x) F(p) dp on the reciprocal grid of a centred p grid."""
    n = values.size
    x = 2 * np.pi * np.fft.fftfreq(n, dp)
    p0 = -dp * (n // 2)
    # sum_j F(p_j) exp(-i p_j x) with p_j = p0 + j dp
    out = dp * np.exp(-1j * p0 * x) * np.fft.fft(values) / np.sqrt(2 * np.pi)
    return np.fft.fftshift(x), np.fft.fftshift(out)


def inverse_transform(func: Callable, n: int, half_width: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse transform of ``func`` on an n-dimensional cube grid; returns (|x|, |F_check(x)|)."""
    p1 = -half_width + (2 * half_width / points) * np.arange(points)
    dp = p1[1] - p1[0]
    grids = np.meshgrid(*([p1] * n), indexing="ij")
    p = np.stack(grids, axis=-1)
    vals = np.asarray(func(p), dtype=complex)
    peak = np.max(np.abs(vals))
    if peak > 0:
        edge = max(float(np.max(np.abs(np.take(vals, i, axis=ax)))) for ax in range(n) for i in (0, -1))
        if edge > 1e-10 * peak:
            raise AliasingError(f"relative magnitude {edge / peak:.1e} at the grid edge exceeds 1e-10")
    x1 = 2 * np.pi * np.fft.fftfreq(points, dp)
    out = np.fft.fftn(vals) * dp**n / (2 * np.pi) ** (n / 2)
    phase = np.ones_like(out)
    for ax in range(n):
        shape = [1] * n
        shape[ax] = points
        phase = phase * np.exp(-1j * p1[0] * x1).reshape(shape)
    out = out * phase
    xs = np.stack(np.meshgrid(*([x1] * n), indexing="ij"), axis=-1)
    return np.linalg.norm(xs, axis=-1).ravel(), np.abs(out).ravel()


def fourier_decay_check(func: Callable, gamma: float, n: int = 1, lam: float = 1.0, window: float | None = None,
                        half_width: float | None = None, points: int = 2**14) -> DecayResult:
    """sup_{|x| <= window} |F_check(x)| (lam + |x|)^{n + gamma} from the FFT route.

    ``window`` must stay well inside the reciprocal grid (|x| < pi/dp) so that
    periodic images of the slowly decaying transform are small.  Defaults
    scale with ``lam``: window 50 lam and momentum half-width 6 / lam.
    """
    window = 50.0 * lam if window is None else window
    half_width = 6.0 / lam if half_width is None else half_width
    if not gamma > -n:
        raise ValueError("decay exponent needs gamma > -n")
    dp = 2 * half_width / points
    if np.pi / dp < 8 * window:
        raise AliasingError("reciprocal grid too short for the requested window; refine the momentum grid")
    r, mag = inverse_transform(func, n, half_width, points)
    keep = r <= window
    return DecayResult(weighted_sup(r[keep], mag[keep], gamma, n, lam), window, dp, points)


@dataclass(frozen=True)
class RefinementResult:
    constants: tuple
    max_drift: float
    tolerance: float = 0.1

    @property
    def passed(self) -> bool:
        return all(np.isfinite(self.constants)) and self.max_drift < self.tolerance


def decay_refinement(func: Callable, gamma: float, n: int = 1, lam: float = 1.0, doublings: int = 2,
                     tolerance: float = 0.1, **kw) -> RefinementResult:
    """Repeat :func:`fourier_decay_check` with the momentum step halved ``doublings`` times."""
    points = kw.pop("points", 2**14 if n == 1 else 128)
    consts = []
    for j in range(doublings + 1):
        consts.append(fourier_decay_check(func, gamma, n, lam, points=points * 2**j, **kw).constant)
    drifts = [abs(b - a) / max(abs(a), abs(b)) if max(abs(a), abs(b)) > 0 else 0.0
              for a, b in zip(consts, consts[1:])]
    return RefinementResult(tuple(consts), max(drifts) if drifts else 0.0, tolerance)


def derivative_spot_check(func1d: Callable, gamma: float, lam: float = 1.0, max_order: int | None = None,
                          rng: np.random.Generator | None = None, samples: int = 10) -> dict:
    """Finite-difference estimates of sup |F^(a)(p)| |p|^{a - gamma} on 0 < |p| < 1/lam (one dimension).

    Orders up to gamma + 2.  Returns the per-order sup; the hypothesis holds if
    they stay moderate (they are not certified bounds).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    top = int(np.floor(gamma + 2)) if max_order is None else max_order
    pts = rng.uniform(0.05, 0.95, samples) / lam * rng.choice([-1.0, 1.0], samples)
    out = {}
    for order in range(top + 1):
        vals = []
        for p in pts:
            h = 1e-3 * abs(p)
            stencil = np.arange(-order, order + 1, 2) * h / 2 if order else np.array([0.0])
            coeff = np.array([(-1) ** (order - j) * _binom(order, j) for j in range(order + 1)]) if order else np.ones(1)
            deriv = float(np.real(coeff @ func1d((p + stencil)[:, None]))) / h**order
            vals.append(abs(deriv) * abs(p) ** (order - gamma))
        out[order] = float(max(vals))
    return out


def _binom(n: int, k: int) -> float:
    from math import comb
    return float(comb(n, k))


def gaussian_singular(gamma: float, lam: float = 1.0) -> Callable:
    """|p|^gamma exp(-lam^2 |p|^2), the reference family; ``p`` carries coordinates on its last axis."""
    def f(p):
        r = np.linalg.norm(np.asarray(p, dtype=float), axis=-1)
        with np.errstate(divide="ignore"):
            base = np.where(r > 0, r ** gamma, 1.0 if gamma == 0 else 0.0)
        return base * np.exp(-(lam * r) ** 2)
    return f


def lorentzian(lam: float = 1.0) -> Callable:
    """(lam^2 + p^2)^-1 in one dimension; its inverse transform is sqrt(pi/2) exp(-lam|x|) / lam."""
    return lambda p: 1.0 / (lam**2 + np.sum(np.asarray(p, dtype=float) ** 2, axis=-1))


def lorentzian_check(x, lam: float = 1.0) -> np.ndarray:
    return np.sqrt(np.pi / 2) * np.exp(-lam * np.abs(np.asarray(x, dtype=float))) / lam


def weighted_sup(r, values, gamma: float, n: int, lam: float) -> float:
    """sup |values| (lam + r)^{n + gamma}."""
    r = np.asarray(r, dtype=float)
    return float(np.max(np.abs(values) * (lam + r) ** (n + gamma))) if r.size else 0.0


# --- interpolation inequality -------------------------------------------------------------------


@dataclass(frozen=True)
class InterpolationResult:
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + SLACK


def interpolation_check(f, h, s: float, eps: float, weights=None) -> InterpolationResult:
    """||h^eps f||_s versus ||f||_s^{1-eps} ||h f||_s^eps on a weighted sample set."""
    f = np.asarray(f)
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("h must be non-negative for real fractional powers")
    if not s > 0:
        raise ValueError("s must be positive")
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    mu = np.ones(f.shape) if weights is None else np.asarray(weights, dtype=float)

    def norm(g):
        return float(np.sum(np.abs(g) ** s * mu) ** (1.0 / s))

    lhs = norm(h**eps * f)
    rhs = norm(f) ** (1.0 - eps) * norm(h * f) ** eps
    return InterpolationResult(lhs, rhs)


# --- dominance ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class DominancePair:
    """Two finite atomic measures on the line, mu1 dominated by mu2 in distribution."""

    x1: np.ndarray
    w1: np.ndarray
    x2: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        for name in ("x1", "w1", "x2", "w2"):
            arr = np.array(getattr(self, name), dtype=float, ndmin=1)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.x1.shape != self.w1.shape or self.x2.shape != self.w2.shape:
            raise ValueError("one weight per atom required")
        if np.any(self.w1 < 0) or np.any(self.w2 < 0):
            raise ValueError("dominance measures must be non-negative")

    def cdf(self, which: int, a) -> np.ndarray:
        x, w = (self.x1, self.w1) if which == 1 else (self.x2, self.w2)
        a = np.asarray(a, dtype=float)
        return (x[None, :] <= a[..., None]) @ w if a.ndim else float(w[x <= a].sum())

    def probe_points(self) -> np.ndarray:
        xs = np.unique(np.concatenate([self.x1, self.x2]))
        mids = 0.5 * (xs[1:] + xs[:-1])
        return np.sort(np.concatenate([xs, mids, [xs[0] - 1.0, xs[-1] + 1.0]]))

    @property
    def dominated(self) -> bool:
        a = self.probe_points()
        return bool(np.all(self.cdf(1, a) <= self.cdf(2, a) + SLACK))

    def to_json(self) -> dict:
        return {"mu1": {"x": self.x1.tolist(), "w": self.w1.tolist()},
                "mu2": {"x": self.x2.tolist(), "w": self.w2.tolist()}}


@dataclass(frozen=True)
class DominanceResult:
    lhs: float
    rhs: float
    step_converges: bool = True

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + SLACK


def is_nonincreasing(x, fx) -> bool:
    order = np.argsort(x, kind="stable")
    v = np.asarray(fx, dtype=float)[order]
    return bool(np.all(np.diff(v) <= SLACK))


def step_approximation(fx, N: int) -> np.ndarray:
    """f_N = 2^-N sum_{k=1}^{4^N} [f >= k 2^-N]: the staircase below f capped at 2^N."""
    fx = np.asarray(fx, dtype=float)
    return np.minimum(np.floor(fx * 2.0**N) / 2.0**N, 2.0**N)


def step_convergence(pair: DominancePair, f: Callable, levels: int = 12) -> bool:
    """int f_N dmu increases with N towards int f dmu, for both measures."""
    ok = True
    for x, w in ((pair.x1, pair.w1), (pair.x2, pair.w2)):
        fx = f(x)
        seq = [float(step_approximation(fx, n) @ w) for n in range(levels + 1)]
        exact = float(fx @ w)
        ok &= all(b >= a - SLACK for a, b in zip(seq, seq[1:]))
        ok &= abs(seq[-1] - exact) <= 2.0**-levels * w.sum() + SLACK
    return bool(ok)


def dominance_integral_check(pair: DominancePair, f: Callable, diagnose: bool = True) -> DominanceResult:
    """int f dmu1 <= int f dmu2 for non-negative non-increasing f."""
    if not pair.dominated:
        raise ValueError("mu1 is not dominated by mu2 in distribution")
    xs = pair.probe_points()
    fx = np.asarray(f(xs), dtype=float)
    if np.any(fx < 0):
        raise ValueError("f must be non-negative")
    if not is_nonincreasing(xs, fx):
        raise ValueError("f must be non-increasing on the sample points")
    lhs = float(np.asarray(f(pair.x1), dtype=float) @ pair.w1)
    rhs = float(np.asarray(f(pair.x2), dtype=float) @ pair.w2)
    conv = step_convergence(pair, f) if diagnose else True
    return DominanceResult(lhs, rhs, conv)


# --- random instances ---------------------------------------------------------------------------


def random_dominance_pair(rng: np.random.Generator, atoms: int = 8, shifts: int = 5,
                          extra_mass: bool = True) -> DominancePair:
    """mu2 random; mu1 obtained by moving mass to the right (and optionally dropping some)."""
    x = np.sort(rng.uniform(-5, 5, atoms))
    w = rng.exponential(1.0, atoms)
    x1, w1 = list(x), list(w)
    for _ in range(shifts):
        i = int(rng.integers(len(x1)))
        frac = rng.uniform(0, 1) * w1[i]
        w1[i] -= frac
        x1.append(x1[i] + rng.exponential(1.0))
        w1.append(frac)
    w1 = np.array(w1)
    if extra_mass:
        w1 *= rng.uniform(0.5, 1.0)
    return DominancePair(np.array(x1), w1, x, w)


def random_nonincreasing_step(rng: np.random.Generator, jumps: int = 6) -> Callable:
    cuts = np.sort(rng.uniform(-6, 6, jumps))
    levels = np.concatenate([[0.0], np.cumsum(rng.exponential(1.0, jumps))])[::-1]

    def f(x):
        return levels[np.searchsorted(cuts, np.asarray(x, dtype=float), side="right")]

    return f


def random_interpolation_instance(rng: np.random.Generator, size: int = 50) -> tuple:
    f = rng.normal(size=size) + 1j * rng.normal(size=size)
    h = rng.exponential(1.0, size) * (rng.random(size) > 0.1)
    s = float(np.exp(rng.uniform(np.log(0.2), np.log(8.0))))
    eps = float(rng.uniform(0, 1))
    mu = rng.exponential(1.0, size)
    return f, h, s, eps, mu
