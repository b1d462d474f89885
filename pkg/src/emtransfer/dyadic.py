"""Smooth energy cutoff, its dyadic pieces, and their fractional-filtered kernels.

``eta`` is an even bump equal to 1 on ``|w| <= 1/(2 lam)`` and vanishing for
``|w| >= 1/lam``.  ``j_n(w) = theta(w) [eta(2^n w) - eta(2^{n+1} w)]`` lives on
``[(2^{n+2} lam)^-1, (2^n lam)^-1]``.  Time-domain kernels ``eta^k_+`` and
``j^k_{n+}`` are obtained from their multipliers on a periodic grid; since all
multipliers are supported in ``[0, 1/lam]`` the grid values are the exact
periodisation of the continuum kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .fractional import Signal, Spectrum, filter_multiplier, from_spectrum

TELESCOPING_TOL = 1e-4


class GridTooSmallError(ValueError):
    """Kernel mass beyond the grid edge exceeds the requested tolerance."""


class DecayFitUnstable(RuntimeError):
    pass


def _smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Mollifier:
    """Plateau bump with an exponential-type transition on ``1/(2 lam) < |w| < 1/lam``.

    ``amplitude`` only exists to switch the profile off in degenerate checks.
    """

    lam: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")

    def eta(self, omega):
        u = 2.0 * self.lam * np.abs(np.asarray(omega, dtype=float)) - 1.0
        return self.amplitude * (1.0 - _smooth_step(u))

    def j(self, omega, n: int):
        if n < 0:
            raise ValueError("dyadic index must be non-negative")
        omega = np.asarray(omega, dtype=float)
        piece = self.eta(2.0**n * omega) - self.eta(2.0 ** (n + 1) * omega)
        return np.where(omega > 0, piece, 0.0)

    def j_support(self, n: int) -> tuple[float, float]:
        return 1.0 / (2.0 ** (n + 2) * self.lam), 1.0 / (2.0**n * self.lam)

    def scaled(self, factor: float) -> "Mollifier":
        return Mollifier(self.lam * factor, self.amplitude)


def eta(omega, mollifier: Mollifier = Mollifier()):
    return mollifier.eta(omega)


def j_n(omega, n: int, mollifier: Mollifier = Mollifier()):
    return mollifier.j(omega, n)


@dataclass(frozen=True)
class KernelGrid:
    """Symmetric periodic time grid ``[-half_width, half_width)`` in units of lam."""

    half_width: float = 2.5e5
    step: float = 0.5

    def signal_grid(self, lam: float) -> tuple[float, float, int]:
        n = int(round(2 * self.half_width / self.step))
        n += n % 2
        return -self.half_width * lam, self.step * lam, n

    def doubled(self) -> "KernelGrid":
        return KernelGrid(2 * self.half_width, self.step)


def kernel_from_multiplier(multiplier, lam: float, grid: KernelGrid) -> Signal:
    """Time kernel ``int exp(-i w s) m(w) dw`` sampled on ``grid``."""
    t0, dt, n = grid.signal_grid(lam)
    omega = 2.0 * np.pi * np.fft.fftfreq(n, dt)
    if np.pi / dt <= 1.0 / lam:
        raise ValueError("grid step too coarse for multipliers supported in [0, 1/lam]")
    return from_spectrum(Spectrum(multiplier(omega), t0, dt))


def eta_k_multiplier(k: float, mollifier: Mollifier):
    return lambda w: filter_multiplier(w, k, +1) * mollifier.eta(w)


def j_k_multiplier(k: float, n: int, mollifier: Mollifier):
    return lambda w: filter_multiplier(w, k, +1) * mollifier.j(w, n)


def residual_multiplier(k: float, N: int, mollifier: Mollifier):
    def mult(w):
        total = mollifier.eta(w) * (np.asarray(w) > 0)
        for n in range(N):
            total = total - mollifier.j(w, n)
        return filter_multiplier(w, k, +1) * total
    return mult


@lru_cache(maxsize=8)
def eta_k_plus(k: float, mollifier: Mollifier = Mollifier(), grid: KernelGrid = KernelGrid()) -> Signal:
    return kernel_from_multiplier(eta_k_multiplier(k, mollifier), mollifier.lam, grid)


def j_k_plus(k: float, n: int, mollifier: Mollifier = Mollifier(), grid: KernelGrid = KernelGrid()) -> Signal:
    return kernel_from_multiplier(j_k_multiplier(k, n, mollifier), mollifier.lam, grid)


def l1_norm(sig: Signal) -> float:
    # periodic trapezoid rule
    return float(np.sum(np.abs(sig.samples)) * sig.dt)


def kernel_at(multiplier_real, s, lam: float) -> np.ndarray:
    """Quadrature evaluation of ``exp(-ik pi/2) int_0^{1/lam} exp(-i w s) w^k g(w) dw``.

    ``multiplier_real(w)`` must return the real factor ``w^k g(w)``; the caller
    applies the constant phase.  Independent of the FFT grid route.
    """
    out = []
    upper = 1.0 / lam
    for si in np.atleast_1d(np.asarray(s, dtype=float)):
        kw = dict(limit=400, epsabs=1e-14, epsrel=1e-12)
        if si == 0:
            re = integrate.quad(multiplier_real, 0.0, upper, **kw)[0]
            im = 0.0
        else:
            re = integrate.quad(multiplier_real, 0.0, upper, weight="cos", wvar=si, **kw)[0]
            im = -integrate.quad(multiplier_real, 0.0, upper, weight="sin", wvar=si, **kw)[0]
        out.append(re + 1j * im)
    return np.array(out)


def eta_k_plus_at(s, k: float, mollifier: Mollifier = Mollifier()) -> np.ndarray:
    g = lambda w: w**k * float(mollifier.eta(w))  # noqa: E731
    return np.exp(-1j * k * np.pi / 2) * kernel_at(g, s, mollifier.lam)


def residual_at(s, k: float, N: int, mollifier: Mollifier = Mollifier()) -> np.ndarray:
    def g(w):
        rest = float(mollifier.eta(w)) - sum(float(mollifier.j(w, n)) for n in range(N))
        return w**k * rest
    return np.exp(-1j * k * np.pi / 2) * kernel_at(g, s, mollifier.lam)


def _asymptotic_tail(sig: Signal, k: float, lam: float, reach: float) -> float:
    """Estimated L1 mass of a ``c |s|^{-1-k}`` kernel beyond ``|s| = reach``."""
    s = sig.times
    window = (np.abs(s) >= reach / 4) & (np.abs(s) <= reach / 2)
    if not np.any(window):
        return 0.0
    c = float(np.max(np.abs(sig.samples[window]) * (lam + np.abs(s[window])) ** (1 + k)))
    return 2.0 * c * reach ** (-k) / k


@dataclass(frozen=True)
class TelescopingResult:
    k: float
    N: int
    ratio: float
    expected: float
    tolerance: float
    edge_error: float

    @property
    def passed(self) -> bool:
        return abs(self.ratio - self.expected) < self.tolerance

    def csv_row(self) -> str:
        return f"{self.k!r},{self.N},{self.ratio!r},{self.expected!r},{self.tolerance!r},{self.passed}"


def telescoping_check(k: float, N: int, mollifier: Mollifier = Mollifier(),
                      grid: KernelGrid = KernelGrid(), tol: float = TELESCOPING_TOL) -> TelescopingResult:
    """Measured ``||eta^k_+ - sum_{n<N} j^k_{n+}||_1 / ||eta^k_+||_1``.

    The residual kernel is synthesised from its own multiplier (cutoff minus
    the dyadic pieces), not from the closed-form rescaling.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    if N < 1:
        raise ValueError("N must be at least 1")
    lam = mollifier.lam
    full = eta_k_plus(k, mollifier, grid)
    resid = kernel_from_multiplier(residual_multiplier(k, N, mollifier), lam, grid)
    norm = l1_norm(full)
    if norm == 0:
        raise ValueError("cutoff profile is identically zero")
    ratio = l1_norm(resid) / norm
    expected = 2.0 ** (-N * k)
    reach = grid.half_width * lam
    # residual is eta^k_+ stretched by 2^N: the grid only sees it out to reach / 2^N
    edge = expected * _asymptotic_tail(full, k, lam, reach / 2**N) / norm
    if edge > tol / 2:
        raise GridTooSmallError(
            f"estimated edge error {edge:.2e} exceeds tol/2 for k={k}, N={N}; enlarge the grid")
    return TelescopingResult(k, N, ratio, expected, tol, edge)


@lru_cache(maxsize=64)
def eta_k_l1(k: float, lam: float = 1.0, half_width: float = 2.5e5, step: float = 0.5) -> float:
    """||eta^k_+||_1 for the default mollifier at scale ``lam`` (cached)."""
    return l1_norm(eta_k_plus(k, Mollifier(lam), KernelGrid(half_width, step)))


def decay_constant(k: float, mollifier: Mollifier = Mollifier(), grid: KernelGrid = KernelGrid(4096.0, 0.25)) -> float:
    """sup |eta^k_+(s)| (lam + |s|)^{1+k} over the alias-safe window |s| <= half_width/4."""
    sig = eta_k_plus(k, mollifier, grid)
    s = sig.times
    window = np.abs(s) <= grid.half_width * mollifier.lam / 4
    return float(np.max(np.abs(sig.samples[window]) * (mollifier.lam + np.abs(s[window])) ** (1 + k)))


def eta_k_decay_fit(k: float, mollifier: Mollifier = Mollifier(), grid: KernelGrid = KernelGrid(4096.0, 0.25),
                    doublings: int = 2, max_drift: float = 0.1) -> float:
    """Decay constant of eta^k_+, required stable under repeated grid doubling."""
    if not k > 0:
        raise ValueError("k must be positive")
    values = [decay_constant(k, mollifier, grid)]
    for _ in range(doublings):
        grid = grid.doubled()
        values.append(decay_constant(k, mollifier, grid))
    for prev, cur in zip(values, values[1:]):
        if prev == 0 and cur == 0:
            continue
        if abs(cur - prev) > max_drift * max(abs(prev), abs(cur)):
            raise DecayFitUnstable(f"decay constant drifts under grid doubling: {values}")
    return values[-1]
