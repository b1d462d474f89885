"""Minkowski geometry, finite atomic measures and the spacelike decay envelope.

Four-vectors are plain float arrays whose last axis has length 4, ordered
``(x0, x1, x2, x3)``.  The Minkowski product has signature (+, -, -, -); the
Euclidean norm is ``|x|^2 = x0^2 + |x_vec|^2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


def four_vector(*components) -> np.ndarray:
    x = np.asarray(components if len(components) > 1 else components[0], dtype=float)
    if x.shape[-1] != 4:
        raise ValueError(f"expected a 4-vector, got shape {x.shape}")
    return x


def minkowski_dot(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] - np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def minkowski_square(x) -> np.ndarray:
    return minkowski_dot(x, x)


def euclidean_norm(x) -> np.ndarray:
    return np.linalg.norm(np.asarray(x, dtype=float), axis=-1)


def spatial_norm(x) -> np.ndarray:
    return np.linalg.norm(np.asarray(x, dtype=float)[..., 1:], axis=-1)


def in_forward_cone(p, atol: float = 1e-12) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p[..., 0] >= spatial_norm(p) - atol


def boost(x, rapidity: float, axis: int = 1) -> np.ndarray:
    """Pure Lorentz boost of rapidity ``rapidity`` along spatial ``axis``."""
    if axis not in (1, 2, 3):
        raise ValueError("boost axis must be 1, 2 or 3")
    x = np.array(x, dtype=float, copy=True)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    t, s = x[..., 0].copy(), x[..., axis].copy()
    x[..., 0] = ch * t + sh * s
    x[..., axis] = sh * t + ch * s
    return x


@dataclass(frozen=True)
class EnvelopeParams:
    """Length scale ``lam`` and decay exponent ``kappa`` of the envelope."""

    lam: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")


def d_kappa(a, params: EnvelopeParams) -> np.ndarray:
    """Spacelike power-law envelope.

    Equal to 1 on the closed light cone (``a.a >= 0``) and to
    ``lam^kappa / (lam + |a_vec| - |a0|)^kappa`` at spacelike separation.
    """
    a = np.asarray(a, dtype=float)
    gap = spatial_norm(a) - np.abs(a[..., 0])
    spacelike = minkowski_square(a) < 0
    # gap > 0 exactly on the spacelike branch; clip keeps the other branch finite
    val = (params.lam / (params.lam + np.clip(gap, 0.0, None))) ** params.kappa
    return np.where(spacelike, val, 1.0)


def covariance_constant(params: EnvelopeParams, points, rapidity: float, axis: int = 1) -> float:
    """max over ``points`` of D(boost(a)) / D(a); finite for every boost."""
    pts = np.asarray(points, dtype=float)
    return float(np.max(d_kappa(boost(pts, rapidity, axis), params) / d_kappa(pts, params)))


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite complex measure on Minkowski space given as weighted atoms."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, ndmin=2)
        w = np.array(self.weights, dtype=complex, ndmin=1)
        if pts.shape[-1] != 4 or pts.ndim != 2:
            raise ValueError(f"points must have shape (n, 4), got {pts.shape}")
        if w.shape != (pts.shape[0],):
            raise ValueError("one weight per atom required")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise ValueError("measure atoms and weights must be finite")
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def delta(cls, x=(0.0, 0.0, 0.0, 0.0), weight: complex = 1.0) -> "DiscreteMeasure":
        return cls(np.asarray(x, dtype=float)[None, :], [weight])

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def conj(self) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, np.conj(self.weights))

    def translated(self, a) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points + np.asarray(a, dtype=float), self.weights)

    def scaled(self, c: complex) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, c * self.weights)

    def phases(self, p) -> np.ndarray:
        """sum_i w_i exp(i p.x_i), i.e. (2 pi)^2 times the Fourier transform."""
        p = np.asarray(p, dtype=float)
        flat = p.reshape(-1, 4)
        arg = flat[:, :1] * self.points[None, :, 0] - flat[:, 1:] @ self.points[:, 1:].T
        out = np.exp(1j * arg) @ self.weights
        return out.reshape(p.shape[:-1])

    def fourier(self, p) -> np.ndarray:
        """(2 pi)^-2 sum_i w_i exp(i p.x_i)."""
        return self.phases(p) / TWO_PI**2

    def to_json(self) -> dict:
        return {
            "atoms": [
                {"x": [float(c) for c in x], "w": [float(w.real), float(w.imag)]}
                for x, w in zip(self.points, self.weights)
            ]
        }

    @classmethod
    def from_json(cls, data) -> "DiscreteMeasure":
        if isinstance(data, str):
            data = json.loads(data)
        atoms = data["atoms"]
        if not atoms:
            raise ValueError("measure needs at least one atom")
        pts = [a["x"] for a in atoms]
        w = [complex(a["w"][0], a["w"][1]) for a in atoms]
        return cls(pts, w)


def envelope_integral(nu1: DiscreteMeasure, nu2: DiscreteMeasure, params: EnvelopeParams,
                      chunk: int = 256) -> float:
    """Double integral of D_kappa(x - y) against |nu1|(dx) |nu2|(dy)."""
    a1 = np.abs(nu1.weights)
    a2 = np.abs(nu2.weights)
    total = 0.0
    for start in range(0, len(nu1), chunk):
        stop = start + chunk
        diff = nu1.points[start:stop, None, :] - nu2.points[None, :, :]
        total += float(a1[start:stop] @ d_kappa(diff, params) @ a2)
    return total
