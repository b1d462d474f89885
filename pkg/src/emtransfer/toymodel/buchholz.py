"""Norm estimates on the kernel of C^n in terms of ||[C, C*]||."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fields import operator_norm

NULL_THRESHOLD = 1e-10
SLACK = 1e-9


class ThresholdAmbiguity(UserWarning):
    """Singular values sit close to the null-space cutoff."""


def nullspace_projector(a: np.ndarray, rel_threshold: float = NULL_THRESHOLD, scale: float = 0.0) -> np.ndarray:
    """Orthogonal projector onto ker(a).

    Singular values below ``rel_threshold * max(s_max, scale)`` count as zero;
    ``scale`` lets a power C^n that is pure roundoff be recognised as zero.
    """
    d = a.shape[1]
    _, s, vh = np.linalg.svd(a)
    smax = max(s[0] if s.size else 0.0, scale)
    if smax == 0:
        return np.eye(d, dtype=complex)
    cut = rel_threshold * smax
    near = (s > cut / 100) & (s < cut * 100)
    if np.any(near):
        warnings.warn(f"singular values within two decades of the cutoff {cut:.2e}: {s[near]}", ThresholdAmbiguity)
    rank = int(np.sum(s >= cut))
    null = vh[rank:].conj().T
    return null @ null.conj().T


@dataclass(frozen=True)
class BuchholzResult:
    n: int
    lhs1: float
    lhs2: float
    rhs1: float
    rhs2: float
    scale: float

    @property
    def passed(self) -> bool:
        slack = SLACK * max(self.scale, 1e-300)
        return self.lhs1 <= self.rhs1 + slack and self.lhs2 <= self.rhs2 + slack


def buchholz_check(c: np.ndarray, n: int) -> BuchholzResult:
    """||CP||^2 <= (n-1)||[C,C*]|| and ||C*P||^2 <= n||[C,C*]|| with P onto ker C^n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    c = np.asarray(c, dtype=complex)
    p = nullspace_projector(np.linalg.matrix_power(c, n), scale=operator_norm(c) ** n)
    comm = operator_norm(c @ c.conj().T - c.conj().T @ c)
    lhs1 = operator_norm(c @ p) ** 2
    lhs2 = operator_norm(c.conj().T @ p) ** 2
    return BuchholzResult(n, lhs1, lhs2, (n - 1) * comm, n * comm, operator_norm(c) ** 2)


def jordan_block(d: int, eig: complex = 0.0) -> np.ndarray:
    return eig * np.eye(d, dtype=complex) + np.diag(np.ones(d - 1, dtype=complex), 1)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_lemma_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random matrix with a nontrivial kernel of some power.

    Half the time a unitarily rotated block upper-triangular matrix with a
    strictly upper-triangular (nilpotent) block and an invertible block,
    otherwise a rank-deficient product.
    """
    if rng.random() < 0.5:
        m = int(rng.integers(1, d + 1))
        t = np.zeros((d, d), dtype=complex)
        nil = np.triu(rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m)), 1)
        t[:m, :m] = nil
        if m < d:
            r = d - m
            inv = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r)) + 3.0 * np.eye(r)
            t[m:, m:] = inv
            t[:m, m:] = rng.normal(size=(m, r))
        u = random_unitary(d, rng)
        return u @ t @ u.conj().T
    rank = int(rng.integers(0, d))
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    b = rng.normal(size=(rank, d)) + 1j * rng.normal(size=(rank, d))
    return a @ b
