import numpy as np
import pytest
from scipy import integrate

from emtransfer.bounds import (
    BoundReport, DecayCurve, DomainError, GaussianTest, RadialSmearing, admissible_order, c_factor,
    commutator_envelope_check, corollary_plane_limit, corollary_point_limit, default_energies, far_plane_offset,
    far_point, fractional_l2_time, gaussian_grid_measure, gaussian_hat, generic_plane_offset, generic_point,
    geometric_gammas, random_fields, random_gaussian_profile, random_measure, ratio_of, require_sobolev_order,
    require_theorem_order, sobolev_bound_check, sobolev_exponent, split_indices, stability_check, theorem_Bk_check,
    theorem_GB_check, weighted_bound_check,
)
from emtransfer.spacetime import DiscreteMeasure, EnvelopeParams
from emtransfer.toymodel import G_minus, G_plus, G_t, random_cone_model, random_field, zero_weight
from emtransfer.toymodel.fields import diagonal_field

PAR = EnvelopeParams(1.0, 1.0)


@pytest.fixture
def setup(rng):
    m = random_cone_model(8, rng)
    return m, random_fields(m, 3, rng), [random_measure(rng, 5) for _ in range(6)]


# --- report mechanics ---------------------------------------------------------------------------


def test_split_indices():
    a, b = split_indices(6)
    assert a.tolist() == [0, 2, 4] and b.tolist() == [1, 3, 5]
    a, b = split_indices(5, "ordered")
    assert a.tolist() == [0, 1] and b.tolist() == [2, 3, 4]
    a, b = split_indices(8, "permutation", seed=1)
    assert sorted(np.concatenate([a, b]).tolist()) == list(range(8))
    with pytest.raises(ValueError):
        split_indices(4, "random")


def test_ratio_of_edge_cases():
    assert ratio_of(1.0, 2.0) == 0.5
    assert ratio_of(0.0, 0.0) == 0.0
    assert ratio_of(1.0, 0.0) == float("inf")


def test_protocol_margin():
    rep = BoundReport("x", "f")
    for lhs in (1.0, 1.5, 1.0, 1.9):
        rep.add(lhs, 1.0)
    assert rep.halves() == (1.0, 1.9) and rep.passed
    rep.add(1.0, 1.0)
    rep.add(5.0, 1.0)
    assert not rep.passed
    rep.check("c", True)
    assert rep.summary()["checks"] == {"c": True}
    assert len(rep.csv_rows()) == rep.n == len(rep.to_json()["instances_detail"])


def test_protocol_zero_holdout_passes():
    rep = BoundReport("x", "f")
    rep.add(0.0, 1.0)
    rep.add(0.0, 1.0)
    assert rep.passed


# --- domains ------------------------------------------------------------------------------------


@pytest.mark.parametrize("kappa, p", [(0.0, 1.0), (2.0, 1.5), (1.0, 1.2), (4.0, 2.0), (3.5, 2.0)])
def test_sobolev_exponent(kappa, p):
    assert sobolev_exponent(kappa) == pytest.approx(p)


def test_domain_errors():
    with pytest.raises(DomainError):
        sobolev_exponent(3.0)
    with pytest.raises(DomainError):
        require_theorem_order(1.0, 1.0)
    require_theorem_order(1.01, 1.0)
    with pytest.raises(DomainError):
        require_sobolev_order(2.0, 4.0)
    with pytest.raises(DomainError):
        require_sobolev_order(1.0, 3.0)
    with pytest.raises(DomainError):
        admissible_order(RadialSmearing(4.5, dim=4), 1.0)
    admissible_order(RadialSmearing(5.0, dim=4), 1.0)
    admissible_order(RadialSmearing(2.0, dim=1), 1.0)
    with pytest.raises(DomainError):
        admissible_order(RadialSmearing(1.5, dim=1), 1.0)
    with pytest.raises(ValueError):
        RadialSmearing(5.0, dim=2)


def test_theorem_rejects_bad_parameters(setup):
    _, fields, measures = setup
    with pytest.raises(DomainError):
        theorem_Bk_check(fields, measures, 0.9, PAR)
    with pytest.raises(DomainError):
        theorem_GB_check(fields, measures, 1.5, PAR, G_minus(0.25, 0.5), variant="+")


def test_weighted_form_domains(setup):
    _, fields, _ = setup
    g = G_t(1.0)
    with pytest.raises(DomainError):
        weighted_bound_check(fields, [], 2.5, 4, g, "Bfi", sigma=0.4)
    with pytest.raises(DomainError):
        weighted_bound_check(fields, [], 1.6, 2, g, "Bvp", sigma=0.6)
    with pytest.raises(DomainError):
        weighted_bound_check(fields, [], 2.5, 4, g, "Bfitwo", beta=1.0, tau=1.0)
    with pytest.raises(DomainError):
        weighted_bound_check(fields, [], 1.6, 2, g, "Bfitwo", beta=0.4, tau=1.0)
    with pytest.raises(ValueError):
        weighted_bound_check(fields, [], 1.6, 2, g, "Bxx")


def test_c_factor():
    assert c_factor(2.0, "+", 0.5) == 2.0
    assert c_factor(2.0, "-", 0.5) == 1.0
    assert c_factor(-1.0, "+", 1.0) == 0.0


# --- smearing objects ---------------------------------------------------------------------------


def test_gaussian_test_mass():
    phi = GaussianTest(amplitude=2.0, time_width=0.5, space_width=2.0)
    assert phi.phases(np.zeros(4)) == pytest.approx(2.0 * (2 * np.pi) ** 2 * 0.5 * 8.0)


def test_gaussian_lp_norms():
    phi = GaussianTest(time_width=1.0, space_width=1.0)
    # ||exp(-|x|^2/2)||_2 over R^4 is pi
    assert phi.lp_norm(2.0) == pytest.approx(np.pi, rel=1e-8)
    assert phi.weighted_lp(2.0, 0.0, 1.0) == pytest.approx(phi.lp_norm(2.0))
    with pytest.raises(ValueError):
        GaussianTest(center=(0, 1, 0, 0)).space_weighted_l2(1.0, 1.0)


def test_radial_smearing_normalised():
    for chi in (RadialSmearing(6.0), RadialSmearing(2.5, dim=1), RadialSmearing(1.0, profile="gaussian")):
        assert chi.phases(np.zeros(4)) == pytest.approx(1.0)
        assert abs(chi.phases(np.array([3.0, 0, 0, 0]))) < 1.0


def test_gaussian_radial_transform_closed_form():
    chi = RadialSmearing(0.0, lam=1.0, cutoff=12.0, profile="gaussian")
    p = np.array([[1.0, 0, 0, 0], [0.5, 0.5, 0.5, 0.5]])
    np.testing.assert_allclose(chi.phases(p), np.exp(-0.5 * np.sum(p**2, axis=1)), atol=1e-10)


def test_grid_measure_phases_match_atoms(rng):
    gm = gaussian_grid_measure(0.3, rng.normal(size=3), 0.8, rng.normal(size=3), n=7)
    p = rng.normal(size=(5, 4))
    np.testing.assert_allclose(gm.phases(p), gm.to_discrete().phases(p), atol=1e-10)
    nu = gm.to_discrete()
    assert gm.envelope_integral(PAR) > 0
    assert gm.lp_norm(2.0) == pytest.approx(np.sqrt(np.sum(np.abs(nu.weights) ** 2) / np.prod(gm.steps)))


def test_fractional_l2_time_matches_direct():
    for w0 in (0.5, 1.0, 3.0):
        phi = GaussianTest(time_width=w0, center=(1.0, 0, 0, 0))
        for s in (0.6, 1.0):
            direct = np.sqrt(integrate.quad(lambda t: (abs(t - 1) ** s * phi.time_profile(t)) ** 2,
                                            -np.inf, np.inf, limit=400)[0])
            assert fractional_l2_time(phi, s) == pytest.approx(direct, rel=1e-5)


def test_random_profile_widths(rng):
    phi = random_gaussian_profile(rng, spatially_centred=True)
    assert phi.center[1:] == (0.0, 0.0, 0.0)
    assert phi.modulation == (0.0, 0.0, 0.0, 0.0)


# --- theorem checks -----------------------------------------------------------------------------


def test_theorem_Bk_small(setup):
    m, fields, measures = setup
    rep = theorem_Bk_check(fields, measures, 1.5, PAR, family="t")
    assert rep.n == 3 * 6 * 2 * len(default_energies(m))
    assert rep.checks == {"minus-annihilates-zero-energy": True, "monotone-in-E": True}
    assert rep.passed


def test_lowering_convention_breaks_annihilation(setup):
    _, fields, measures = setup
    rep = theorem_Bk_check(fields, measures, 1.5, PAR, convention="lowering")
    assert rep.checks["minus-annihilates-zero-energy"] is False


def test_diagonal_field_gives_zero(setup):
    m, _, measures = setup
    b = diagonal_field(m, np.arange(m.dim))
    rep = theorem_Bk_check([b], measures, 1.5, PAR)
    assert max(rep.lhs) == 0 and rep.passed


@pytest.mark.parametrize("variant, weight", [("+", G_plus(1.0)), ("-", G_minus(0.25, 0.5)), ("t", G_t(1.0))])
def test_theorem_GB_small(setup, variant, weight):
    _, fields, measures = setup
    rep = theorem_GB_check(fields, measures, 1.5, PAR, weight, variant=variant)
    assert rep.passed
    if variant != "t":
        assert rep.checks["dominance-derived-bound"]


def test_theorem_GB_zero_weight(setup):
    _, fields, measures = setup
    rep = theorem_GB_check(fields, measures, 1.5, PAR, zero_weight(), variant="+")
    assert max(rep.lhs) == 0 and rep.passed


def test_envelope_and_stability(setup, rng):
    _, fields, _ = setup
    pairs = [(b, b.adjoint(), random_measure(rng, 4), random_measure(rng, 4)) for b in fields[:2]]
    assert commutator_envelope_check(pairs, PAR).passed
    rep = stability_check(fields[:1], [RadialSmearing(6.0, cutoff=16.0), RadialSmearing(2.5, dim=1, cutoff=16.0)], PAR)
    assert rep.checks["finite-refit"]


def test_sobolev_small(setup, rng):
    _, fields, _ = setup
    gms = [gaussian_grid_measure(rng.normal(), rng.normal(size=3), 1.0, scale=R, n=9) for R in (1, 2, 4, 8)]
    rep = sobolev_bound_check(fields, gms, 1.6, 2.0, G_t(1.0))
    assert rep.params["p"] == 1.5 and rep.n == 12


def test_weighted_spectral_form_checks_plancherel(setup, rng):
    _, fields, _ = setup
    pro = [random_gaussian_profile(rng) for _ in range(4)]
    rep = weighted_bound_check(fields, pro, 2.5, 4, G_t(1.0), "Bvp", sigma=0.6)
    assert rep.checks["plancherel-derivative"]


# --- corollaries --------------------------------------------------------------------------------


def test_decay_curve_logic():
    g = geometric_gammas(100.0, 4)
    assert g[0] == 1.0 and g[-1] == pytest.approx(100.0) and len(g) == 9
    assert DecayCurve(g, np.geomspace(1, 1e-3, 9)).passed
    assert not DecayCurve(g, np.ones(9)).passed
    assert DecayCurve(g, np.zeros(9)).passed
    rising = np.geomspace(1, 1e-3, 9)
    rising[-1] = rising[4] * 2  # above the value one decade earlier
    assert not DecayCurve(g, rising).no_late_growth


def test_corollary_point_generic(rng):
    m = random_cone_model(8, rng)
    b = random_field(m, rng)
    q = generic_point(m, rng)
    curve = corollary_point_limit(b, 1.0, q, 0.5, G_t(1.0))
    assert curve.passed
    far = corollary_point_limit(b, 1.0, far_point(m), 0.5, G_t(1.0), phi_hat=gaussian_hat(1.0))
    assert far.values[-1] < 1e-3 and far.passed


def test_corollary_plane_generic(rng):
    m = random_cone_model(8, rng)
    b = random_field(m, rng)
    n = np.array([0.0, 1.0, 0.0, 0.0])
    assert corollary_plane_limit(b, 1.0, n, generic_plane_offset(m, n, rng), G_t(1.0)).passed
    far = corollary_plane_limit(b, 1.0, n, far_plane_offset(m, n), G_t(1.0))
    assert far.passed


def test_corollary_domains(rng):
    m = random_cone_model(4, rng)
    b = random_field(m, rng)
    with pytest.raises(DomainError):
        corollary_point_limit(b, 1.0, np.zeros(4), 1.0, G_t(1.0))
    with pytest.raises(DomainError):
        corollary_point_limit(b, 0.5, np.zeros(4), 0.5, G_t(1.0))
    with pytest.raises(DomainError):
        corollary_plane_limit(b, 1.0, np.array([1.0, 0, 0, 0]), 0.0, G_t(1.0))
    with pytest.raises(DomainError):
        corollary_point_limit(b, 1.0, np.zeros(4), 0.5, G_minus(0.25, 0.5))


def test_measure_helper(rng):
    nu = random_measure(rng, 3, extent=1.0, time_extent=0.0)
    assert isinstance(nu, DiscreteMeasure) and np.all(nu.points[:, 0] == 0)
