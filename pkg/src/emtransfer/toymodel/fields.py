"""Bounded operators on a finite model and the maps the estimates act on.

Matrices are written in the joint eigenbasis of P^mu, so translation acts
element-wise: ``B(x)_mn = exp(i x.(p_m - p_n)) B_mn``.  Every filter defined
through the Fourier transform of ``x -> B(x)`` therefore reduces to a
multiplier on matrix elements evaluated at the transfer ``p_m - p_n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dyadic import Mollifier, eta_k_l1
from ..fractional import Signal, filter_signal
from ..spacetime import EnvelopeParams, d_kappa, euclidean_norm, minkowski_dot
from .spectrum import QuantumModel


def operator_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def power_iteration_norm(a: np.ndarray, iters: int = 2000, seed: int = 0, tol: float = 1e-14) -> float:
    """Largest singular value by power iteration on A*A (independent of SVD)."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=a.shape[1]) + 1j * rng.normal(size=a.shape[1])
    v /= np.linalg.norm(v)
    gram = a.conj().T @ a
    est = 0.0
    for _ in range(iters):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        if abs(nw - est) <= tol * nw:
            est = nw
            break
        est = nw
    return float(np.sqrt(est))


@dataclass(frozen=True)
class OperatorField:
    model: QuantumModel
    matrix: np.ndarray

    def __post_init__(self):
        b = np.array(self.matrix, dtype=complex)
        d = self.model.dim
        if b.shape != (d, d):
            raise ValueError(f"matrix shape {b.shape} does not match model dimension {d}")
        if not np.all(np.isfinite(b)):
            raise ValueError("operator matrix must be finite")
        b.flags.writeable = False
        object.__setattr__(self, "matrix", b)

    def with_matrix(self, matrix) -> "OperatorField":
        return OperatorField(self.model, matrix)

    def adjoint(self) -> "OperatorField":
        return self.with_matrix(self.matrix.conj().T)

    def norm(self) -> float:
        return operator_norm(self.matrix)

    def translate(self, x) -> "OperatorField":
        return translate(self, x)

    def smear(self, nu) -> "OperatorField":
        return smear(self, nu)

    def matrix_json(self) -> list:
        """Dense matrix as rows of [re, im] pairs."""
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]

    @classmethod
    def from_matrix_json(cls, model: QuantumModel, data) -> "OperatorField":
        if isinstance(data, dict):
            data = data["matrix"]
        rows = [[complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in row] for row in data]
        return cls(model, np.array(rows, dtype=complex))

    def __add__(self, other: "OperatorField") -> "OperatorField":
        return self.with_matrix(self.matrix + other.matrix)

    def __sub__(self, other: "OperatorField") -> "OperatorField":
        return self.with_matrix(self.matrix - other.matrix)


def random_field(model: QuantumModel, rng: np.random.Generator, normalise: bool = True) -> OperatorField:
    d = model.dim
    b = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2 * d)
    if normalise:
        b /= operator_norm(b)
    return OperatorField(model, b)


def diagonal_field(model: QuantumModel, values) -> OperatorField:
    return OperatorField(model, np.diag(np.asarray(values, dtype=complex)))


def translation_phases(model: QuantumModel, x) -> np.ndarray:
    return np.exp(1j * minkowski_dot(model.transfers(), np.asarray(x, dtype=float)))


def translate(field: OperatorField, x) -> OperatorField:
    """B(x) = U(x) B U(-x)."""
    return field.with_matrix(field.matrix * translation_phases(field.model, x))


def smear(field: OperatorField, nu) -> OperatorField:
    """B(nu) = int B(x) dnu(x) for any object exposing ``phases(p)``.

    ``phases(p)`` must return ``int exp(i p.x) dnu(x)``; a
    :class:`~emtransfer.spacetime.DiscreteMeasure` does, as do the closed-form
    test functions of :mod:`emtransfer.bounds`.
    """
    return field.with_matrix(field.matrix * nu.phases(field.model.transfers()))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def commutator_norm(b1: OperatorField, b2: OperatorField, x=(0.0, 0.0, 0.0, 0.0)) -> float:
    """||[B1, B2(x)]||."""
    return operator_norm(commutator(b1.matrix, translate(b2, x).matrix))


def default_kappa_grid(lam: float = 1.0, extent: float = 8.0, n_radial: int = 9, n_time: int = 7) -> np.ndarray:
    """Deterministic set of separations mixing timelike, lightlike and spacelike points."""
    radii = lam * np.linspace(0.0, extent, n_radial)
    times = lam * np.linspace(-extent / 2, extent / 2, n_time)
    dirs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=float)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = [[t, *(r * u)] for t in times for r in radii for u in dirs]
    return np.unique(np.array(pts), axis=0)


def commutator_profile(b1: OperatorField, b2: OperatorField, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.array([commutator_norm(b1, b2, a) for a in pts])


def kappa_fit(b1: OperatorField, params: EnvelopeParams, points, b2: OperatorField | None = None) -> float:
    """Least c with ||[B1, B2(a)]|| <= c D_kappa(a) on ``points`` (B2 defaults to B1*)."""
    if b2 is None:
        b2 = b1.adjoint()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("kappa grid is empty")
    ratios = commutator_profile(b1, b2, pts) / d_kappa(pts, params)
    return float(np.max(ratios))


def spectral_projector(model: QuantumModel, energy: float) -> np.ndarray:
    """P(E): projector onto states with p0 <= E (zero for E < 0)."""
    return np.diag((model.energies <= energy).astype(complex))


def energy_weight(model: QuantumModel, weight, extended: bool = False) -> np.ndarray:
    """Diagonal matrix G(P0); ``weight`` is a callable or :class:`EnergyWeight`."""
    values = np.array([weight(e) for e in model.energies], dtype=float)
    if np.any(np.isinf(values)) and not extended:
        raise ValueError("energy weight is infinite on the model spectrum; pass extended=True")
    return np.diag(values)


def right_weighted(a: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """A @ diag(weights), treating 0 * inf as 0 (a column the operator never reaches)."""
    w = np.diag(weights) if weights.ndim == 2 else weights
    with np.errstate(invalid="ignore"):
        out = a * w[None, :]
    zero_cols = np.all(a == 0, axis=0)
    out[:, zero_cols & np.isinf(w)] = 0.0
    return out


def frequency_parts(field: OperatorField, k: float, convention: str = "raising") -> tuple[OperatorField, OperatorField]:
    """Creation/annihilation parts of the order-k time derivative.

    (B^k_+-)_mn = exp(-+ i k pi/2) theta(+-w_mn) |w_mn|^k B_mn; zero-transfer
    elements go to zero in both parts.
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    w = field.model.bohr_frequencies(convention)
    mag = np.abs(w) ** k
    plus = np.where(w > 0, np.exp(-1j * k * np.pi / 2) * mag, 0.0)
    minus = np.where(w < 0, np.exp(1j * k * np.pi / 2) * mag, 0.0)
    return field.with_matrix(field.matrix * plus), field.with_matrix(field.matrix * minus)


def frequency_part(field: OperatorField, k: float, sign: str, convention: str = "raising") -> OperatorField:
    plus, minus = frequency_parts(field, k, convention)
    return {"+": plus, "-": minus}[sign]


def momentum_filter(field: OperatorField, k: float) -> OperatorField:
    """(B^k_t)_mn = |p_m - p_n|^k B_mn with the Euclidean four-norm."""
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    return field.with_matrix(field.matrix * euclidean_norm(field.model.transfers()) ** k)


def time_derivative(field: OperatorField, n: int) -> OperatorField:
    """n-th derivative of tau -> B(tau t) at tau = 0, from the Bohr frequencies."""
    w = field.model.bohr_frequencies()
    return field.with_matrix(field.matrix * (1j * w) ** n)


def time_domain_parts(field: OperatorField, k: float, period: float, oversample: int = 4) -> tuple[OperatorField, OperatorField]:
    """B^k_+- from sampled trajectories tau -> B(tau t)_mn and the FFT filters.

    The operator parts use the reflected convolution int B(s) T(s - tau) ds,
    so the ordinary filter is applied to the reversed trajectory
    ``s -> B(-s t)`` and read off at ``s = 0``.  Exact only when every Bohr
    frequency is a multiple of ``2 pi / period``.
    """
    w = field.model.bohr_frequencies()
    cycles = w * period / (2 * np.pi)
    if not np.allclose(cycles, np.round(cycles), atol=1e-9):
        raise ValueError("Bohr frequencies are not commensurate with the sampling period")
    wmax = float(np.max(np.abs(w)))
    n = 16
    while np.pi * n / period <= oversample * max(wmax, 1e-300):
        n *= 2
    dt = period / n
    t0 = -period / 2
    mid = n // 2
    s = t0 + dt * np.arange(n)
    d = field.model.dim
    out = {+1: np.zeros((d, d), complex), -1: np.zeros((d, d), complex)}
    for m in range(d):
        for j in range(d):
            b = field.matrix[m, j]
            if b == 0:
                continue
            sig = Signal(b * np.exp(-1j * s * w[m, j]), t0, dt)
            for sign in (1, -1):
                out[sign][m, j] = filter_signal(sig, k, sign, pad=1).samples[mid]
    return field.with_matrix(out[1]), field.with_matrix(out[-1])


@dataclass(frozen=True)
class DyadicSplit:
    high: OperatorField
    pieces: list
    residual: OperatorField
    residual_norm: float
    bound: float
    plus_part: OperatorField

    def reconstruction_error(self) -> float:
        total = self.high.matrix + self.residual.matrix + sum(p.matrix for p in self.pieces)
        ref = max(self.plus_part.norm(), 1e-300)
        return operator_norm(total - self.plus_part.matrix) / ref


def dyadic_operator_split(field: OperatorField, k: float, N: int, mollifier: Mollifier = Mollifier()) -> DyadicSplit:
    """B^k_+ = B^k_> + sum_{n<N} B^k_n + residual, cut at the Bohr frequencies.

    ``bound`` is 2^{-Nk} ||eta^k_+||_1 ||B||.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    plus, _ = frequency_parts(field, k)
    w = field.model.bohr_frequencies()
    high = plus.with_matrix(plus.matrix * (1.0 - mollifier.eta(w)))
    pieces = [plus.with_matrix(plus.matrix * mollifier.j(w, n)) for n in range(N)]
    residual = plus.matrix - high.matrix - sum((p.matrix for p in pieces), np.zeros_like(plus.matrix))
    bound = 2.0 ** (-N * k) * eta_k_l1(float(k), mollifier.lam) * mollifier.amplitude * field.norm()
    res = plus.with_matrix(residual)
    return DyadicSplit(high, pieces, res, res.norm(), bound, plus)
