import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emtransfer.dyadic import Mollifier
from emtransfer.scaling import cancelling_measure
from emtransfer.spacetime import DiscreteMeasure, EnvelopeParams
from emtransfer.toymodel import (
    G_minus, G_plus, G_t, OperatorField, QuantumModel, buchholz_check, bundled_mass_shell, commutator_norm,
    default_kappa_grid, dyadic_operator_split, energy_weight, frequency_parts, generate, jordan_block, kappa_fit,
    lattice_model, mass_shell_model, momentum_filter, nullspace_projector, operator_norm, power_iteration_norm,
    random_cone_model, random_field, random_lemma_matrix, spatially_distinct, spectral_projector, time_derivative,
    time_domain_parts, translate, zero_weight,
)
from emtransfer.toymodel.fields import diagonal_field, right_weighted

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def model(rng):
    return random_cone_model(8, rng)


# --- spectra ------------------------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["random-cone", "lattice", "mass-shell"])
def test_generators_stay_in_cone(kind):
    m = generate(kind, 12, seed=3)
    assert m.dim == 12
    assert np.all(m.spectrum[:, 0] >= np.linalg.norm(m.spectrum[:, 1:], axis=1) - 1e-12)
    assert m.has_zero_energy


def test_model_rejects_points_outside_cone():
    with pytest.raises(ValueError):
        QuantumModel([[1.0, 2.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        generate("bogus", 4)
    with pytest.raises(ValueError):
        lattice_model(4, velocity=1.5)


def test_bundled_model():
    m = bundled_mass_shell()
    assert m.dim == 32
    assert not spatially_distinct(m)  # vacuum and the resting shell state share p_vec = 0
    on_shell = m.spectrum[1:]
    np.testing.assert_allclose(on_shell[:, 0] ** 2 - np.sum(on_shell[:, 1:] ** 2, axis=1), 1.0)
    np.testing.assert_array_equal(generate("mass-shell", 32).spectrum, m.spectrum)


def test_model_json_roundtrip(tmp_path, model):
    path = tmp_path / "m.json"
    model.save(path)
    back = QuantumModel.load(path)
    np.testing.assert_array_equal(back.spectrum, model.spectrum)
    assert back.name == model.name


def test_quantised_energies(rng):
    m = random_cone_model(10, rng, energy_quantum=0.25)
    np.testing.assert_allclose(m.energies / 0.25, np.round(m.energies / 0.25))


def test_bohr_conventions(model):
    raising = model.bohr_frequencies()
    np.testing.assert_array_equal(model.bohr_frequencies("lowering"), -raising)
    with pytest.raises(ValueError):
        model.bohr_frequencies("sideways")


def test_translation_unitary_matches_phases(model, rng):
    b = random_field(model, rng)
    x = rng.normal(size=4)
    u = model.translation(x)
    np.testing.assert_allclose(u @ b.matrix @ u.conj().T, translate(b, x).matrix, atol=1e-12)


# --- fields -------------------------------------------------------------------------------------


@given(seeds)
def test_translation_group_law(seed):
    rng = np.random.default_rng(seed)
    m = random_cone_model(6, rng)
    b = random_field(m, rng)
    x, y = rng.normal(size=4), rng.normal(size=4)
    np.testing.assert_allclose(b.translate(x).translate(y).matrix, b.translate(x + y).matrix, atol=1e-10)


@given(seeds)
def test_smear_adjoint(seed):
    # B(nu)* = B*(conj nu)
    rng = np.random.default_rng(seed)
    m = random_cone_model(6, rng)
    b = random_field(m, rng)
    nu = DiscreteMeasure(rng.normal(size=(4, 4)), rng.normal(size=4) + 1j * rng.normal(size=4))
    np.testing.assert_allclose(b.smear(nu).adjoint().matrix, b.adjoint().smear(nu.conj()).matrix, atol=1e-12)


def test_smear_by_delta_is_translation(model, rng):
    b = random_field(model, rng)
    x = rng.normal(size=4)
    np.testing.assert_allclose(b.smear(DiscreteMeasure.delta(x)).matrix, b.translate(x).matrix, atol=1e-12)


def test_spectral_content_of_smearing(model, rng):
    # an element survives smearing only where the measure transform is nonzero at its transfer
    b = random_field(model, rng)
    q = model.transfers()
    nu = cancelling_measure(q[2, 0])
    out = b.smear(nu).matrix
    assert abs(out[2, 0]) <= 1e-15
    np.testing.assert_allclose(out, b.matrix * nu.phases(q))


def test_jordan_commutator_norm():
    m = lattice_model(2)
    j = OperatorField(m, jordan_block(2))
    assert commutator_norm(j, j.adjoint()) == pytest.approx(1.0)


def test_kappa_fit_monotone_in_kappa(model, rng):
    b = random_field(model, rng)
    pts = default_kappa_grid()
    fits = [kappa_fit(b, EnvelopeParams(1.0, k), pts) for k in (0.5, 1.0, 2.0, 3.0)]
    assert all(a <= c + 1e-12 for a, c in zip(fits, fits[1:]))
    with pytest.raises(ValueError):
        kappa_fit(b, EnvelopeParams(), np.zeros((0, 4)))


def test_projector_idempotent_and_monotone(model):
    es = np.unique(model.energies)
    prev = np.zeros((model.dim, model.dim))
    for e in es:
        p = spectral_projector(model, e)
        np.testing.assert_allclose(p @ p, p)
        assert np.all(np.diag(p).real >= np.diag(prev).real)
        prev = p
    assert not spectral_projector(model, -1.0).any()


def test_power_iteration_matches_svd(rng):
    a = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    assert power_iteration_norm(a) == pytest.approx(operator_norm(a), rel=1e-8)


def test_energy_weight_matrix(model):
    g = energy_weight(model, G_plus(1.0))
    np.testing.assert_allclose(np.diag(g), 1 / (1 + model.energies))
    with pytest.raises(ValueError):
        energy_weight(model, G_minus(0.25, 0.5))
    ext = energy_weight(model, G_minus(0.25, 0.5), extended=True)
    assert np.isinf(np.diag(ext)).any()


def test_right_weighted_zero_times_inf(model, rng):
    a = rng.normal(size=(model.dim, model.dim)) + 0j
    a[:, 0] = 0
    w = np.ones(model.dim)
    w[0] = np.inf
    out = right_weighted(a, w)
    assert np.all(np.isfinite(out))


def test_momentum_filter(model, rng):
    b = random_field(model, rng)
    q = model.transfers()
    expect = b.matrix * np.linalg.norm(q, axis=-1) ** 2
    np.testing.assert_allclose(momentum_filter(b, 2.0).matrix, expect)
    with pytest.raises(ValueError):
        momentum_filter(b, 0.0)


# --- frequency parts ----------------------------------------------------------------------------


@given(seeds, st.integers(1, 4))
def test_parts_sum_to_signed_derivative(seed, n):
    rng = np.random.default_rng(seed)
    m = random_cone_model(6, rng)
    b = random_field(m, rng)
    plus, minus = frequency_parts(b, n)
    np.testing.assert_allclose(plus.matrix + minus.matrix, (-1) ** n * time_derivative(b, n).matrix, atol=1e-9)


def test_minus_part_annihilates_ground(model, rng):
    b = random_field(model, rng)
    _, minus = frequency_parts(b, 1.5)
    assert operator_norm(minus.matrix @ spectral_projector(model, 0.0)) <= 1e-12
    plus_low, _ = frequency_parts(b, 1.5, convention="lowering")
    assert operator_norm(plus_low.matrix @ spectral_projector(model, 0.0)) <= 1e-12


def test_parts_reject_bad_order(model, rng):
    with pytest.raises(ValueError):
        frequency_parts(random_field(model, rng), 0.0)


def test_time_domain_parts_agree(rng):
    m = random_cone_model(6, rng, energy_quantum=0.25)
    b = random_field(m, rng)
    plus, minus = frequency_parts(b, 1.5)
    tp, tm = time_domain_parts(b, 1.5, period=2 * np.pi / 0.25)
    assert operator_norm(tp.matrix - plus.matrix) < 1e-6 * max(1, plus.norm())
    assert operator_norm(tm.matrix - minus.matrix) < 1e-6 * max(1, minus.norm())


def test_time_domain_parts_need_commensurate_frequencies(model, rng):
    with pytest.raises(ValueError):
        time_domain_parts(random_field(model, rng), 1.0, period=1.0)


# --- dyadic operator split ----------------------------------------------------------------------


@pytest.mark.parametrize("N", [0, 3, 6])
def test_dyadic_split(N, rng):
    m = random_cone_model(10, rng, scale=0.5)
    b = random_field(m, rng)
    split = dyadic_operator_split(b, 1.5, N)
    assert split.reconstruction_error() <= 1e-10
    assert split.residual_norm <= split.bound
    w = m.bohr_frequencies()
    moll = Mollifier()
    for n, piece in enumerate(split.pieces):
        lo, hi = moll.j_support(n)
        outside = (w <= lo) | (w >= hi)
        assert np.all(piece.matrix[outside] == 0)


def test_dyadic_split_zero_amplitude(model, rng):
    split = dyadic_operator_split(random_field(model, rng), 1.0, 2, Mollifier(1.0, 0.0))
    assert split.bound == 0.0
    assert split.reconstruction_error() <= 1e-12


# --- Buchholz lemma -----------------------------------------------------------------------------


def test_buchholz_jordan_equality():
    r = buchholz_check(jordan_block(2), 2)
    assert r.lhs1 == pytest.approx(r.rhs1) and r.rhs1 == pytest.approx(1.0)
    r1 = buchholz_check(jordan_block(2), 1)
    assert r1.lhs2 == pytest.approx(r1.rhs2) == pytest.approx(1.0)
    assert r.passed and r1.passed


@given(seeds)
def test_buchholz_random(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 10))
    c = random_lemma_matrix(d, rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert buchholz_check(c, int(rng.integers(1, 5))).passed


def test_buchholz_normal_matrix_kernel_is_exact():
    c = np.diag([0.0, 0.0, 1.0, 2.0]).astype(complex)
    r = buchholz_check(c, 3)
    assert r.rhs1 == 0 and r.lhs1 <= 1e-20 and r.lhs2 <= 1e-20


def test_nullspace_projector():
    a = np.diag([1.0, 0.0, 0.0]).astype(complex)
    p = nullspace_projector(a)
    np.testing.assert_allclose(p, np.diag([0, 1, 1]))
    np.testing.assert_allclose(nullspace_projector(np.zeros((2, 2))), np.eye(2))
    with pytest.raises(ValueError):
        buchholz_check(a, 0)


# --- weights ------------------------------------------------------------------------------------


def test_weight_flags():
    assert G_plus(1.0).admissible("+")
    gm = G_minus(0.25, 0.5)
    assert gm.admissible("-") and not gm.admissible("+")
    assert G_minus(0.0, 1.0).admissible("+")
    flags = G_plus(1.0).check_flags()
    assert flags == {"nonincreasing": True, "bounded_at_0": True, "square_integrable": True}
    assert gm.check_flags()["bounded_at_0"] is False
    assert G_t(1.0)(np.array([0.0, 1.0])).tolist() == [1.0, 0.5]
    assert zero_weight()(1.0) == 0


def test_weight_domain_errors():
    with pytest.raises(ValueError):
        G_plus(0.5)
    with pytest.raises(ValueError):
        G_minus(0.5, 1.0)
    with pytest.raises(ValueError):
        G_minus(0.1, 0.2)
    with pytest.raises(ValueError):
        G_plus(1.0)(-1.0)
    with pytest.raises(ValueError):
        G_plus(1.0).admissible("x")


def test_weight_l2():
    # int_0^inf (1 + E)^{-2} dE = 1
    assert G_plus(1.0).l2_squared() == pytest.approx(1.0, rel=1e-8)


def test_field_json_and_validation(model, rng):
    b = random_field(model, rng)
    back = OperatorField.from_matrix_json(model, {"matrix": b.matrix_json()})
    np.testing.assert_array_equal(back.matrix, b.matrix)
    with pytest.raises(ValueError):
        OperatorField(model, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        OperatorField(model, np.full((model.dim, model.dim), np.nan))
    d = diagonal_field(model, np.arange(model.dim))
    assert (d - d).norm() == 0 and (d + d).norm() == pytest.approx(2 * (model.dim - 1))


def test_mass_shell_model_custom():
    m = mass_shell_model(2.0, [[0.0, 0.0, 0.0]], include_vacuum=False)
    np.testing.assert_allclose(m.spectrum, [[2.0, 0, 0, 0]])
