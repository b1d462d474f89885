import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emtransfer.dyadic import (
    DecayFitUnstable, GridTooSmallError, decay_constant, j_k_plus, KernelGrid, Mollifier, eta, eta_k_decay_fit, eta_k_plus, eta_k_plus_at, j_n,
    kernel_from_multiplier, l1_norm, residual_at, residual_multiplier, eta_k_multiplier, telescoping_check,
)

SMALL = KernelGrid(2.5e4, 0.5)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_eta_plateau_and_support(lam):
    m = Mollifier(lam)
    w = np.linspace(-3 / lam, 3 / lam, 2001)
    v = eta(w, m)
    assert np.all(v[np.abs(w) <= 1 / (2 * lam)] == 1.0)
    assert np.all(v[np.abs(w) >= 1 / lam] == 0.0)
    assert np.all((v >= 0) & (v <= 1))
    np.testing.assert_array_equal(v, eta(-w, m))


@given(st.integers(0, 8))
def test_j_n_support(n):
    m = Mollifier()
    lo, hi = m.j_support(n)
    w = np.linspace(-2, 2, 4001)
    v = j_n(w, n, m)
    assert np.all(v[(w <= lo) | (w >= hi)] == 0)
    assert np.all(v >= -1e-15)


@given(st.integers(1, 10), st.floats(1e-4, 3.0))
def test_partition_of_unity(N, w):
    m = Mollifier()
    total = sum(float(m.j(w, n)) for n in range(N)) + float(m.eta(2.0**N * w))
    assert total == pytest.approx(float(m.eta(w)), abs=1e-14)


def test_j_negative_index_rejected():
    with pytest.raises(ValueError):
        Mollifier().j(1.0, -1)
    with pytest.raises(ValueError):
        Mollifier(0.0)


@given(st.integers(1, 6), st.floats(0.5, 3.0), st.floats(1e-3, 1.0))
def test_residual_is_rescaled_cutoff(N, k, w):
    m = Mollifier()
    lhs = residual_multiplier(k, N, m)(np.array([w]))
    rhs = 2.0 ** (-N * k) * eta_k_multiplier(k, m)(np.array([2.0**N * w]))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-14)


def test_fft_kernel_matches_quadrature():
    grid = KernelGrid(4096.0, 0.25)
    sig = eta_k_plus(1.5, Mollifier(), grid)
    s = np.array([0.0, 1.0, 5.0, 20.0])
    idx = [int(np.argmin(np.abs(sig.times - x))) for x in s]
    np.testing.assert_allclose(sig.samples[idx], eta_k_plus_at(s, 1.5), atol=1e-9)


def test_residual_quadrature_scaling():
    # residual kernel at s equals 2^{-N(k+1)} eta^k_+(2^{-N} s)
    k, N = 1.5, 2
    s = np.array([0.0, 3.0, 10.0])
    np.testing.assert_allclose(residual_at(s, k, N), 2.0 ** (-N * (k + 1)) * eta_k_plus_at(s / 2**N, k), atol=1e-10)


@pytest.mark.parametrize("k", [1.0, 2.0])
def test_telescoping_small_grid(k):
    r = telescoping_check(k, 1, grid=SMALL)
    assert r.passed
    assert r.expected == 2.0**-k
    assert r.csv_row().endswith("True")


def test_telescoping_detects_short_grid():
    with pytest.raises(GridTooSmallError):
        telescoping_check(1.0, 6, grid=KernelGrid(1e3, 0.5))


def test_telescoping_argument_checks():
    with pytest.raises(ValueError):
        telescoping_check(0.0, 1)
    with pytest.raises(ValueError):
        telescoping_check(1.0, 0)


def test_kernel_grid_too_coarse():
    with pytest.raises(ValueError):
        kernel_from_multiplier(lambda w: w, 1.0, KernelGrid(100.0, 4.0))


def test_l1_norm_scales_with_lam():
    # eta^k_+ at scale lam is lam^{-k-1} eta^k_+(s / lam), so its L1 norm scales as lam^{-k}
    k = 1.5
    a = l1_norm(eta_k_plus(k, Mollifier(1.0), SMALL))
    b = l1_norm(eta_k_plus(k, Mollifier(2.0), SMALL))
    assert b / a == pytest.approx(2.0**-k, rel=1e-6)


def test_decay_fit_stable():
    c = eta_k_decay_fit(1.5)
    assert np.isfinite(c) and c > 0


def test_decay_fit_reports_instability():
    with pytest.raises(DecayFitUnstable):
        eta_k_decay_fit(1.5, max_drift=0.0, grid=KernelGrid(64.0, 0.25))
    with pytest.raises(ValueError):
        eta_k_decay_fit(0.0)


def test_decay_constant_invariant_under_rescaled_mollifier():
    # the kernel at scale lam is lam^{-k-1} eta(s / lam), so the weighted sup does not move
    grid = KernelGrid(4096.0, 0.25)
    assert decay_constant(1.5, Mollifier(2.0), grid) == pytest.approx(decay_constant(1.5, Mollifier(1.0), grid),
                                                                      rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dyadic_kernel_scaling(n):
    # j^k_{n+}(tau) = 2^{-n(k+1)} j^k_{0+}(2^{-n} tau)
    k, grid = 1.5, KernelGrid(4096.0, 0.25)
    base = j_k_plus(k, 0, Mollifier(), grid)
    piece = j_k_plus(k, n, Mollifier(), grid)
    t = np.array([0.0, 1.0, 3.0, 10.0])
    ia = [int(np.argmin(np.abs(base.times - x))) for x in t]
    ib = [int(np.argmin(np.abs(piece.times - 2**n * x))) for x in t]
    np.testing.assert_allclose(piece.samples[ib], 2.0 ** (-n * (k + 1)) * base.samples[ia], atol=1e-8)
