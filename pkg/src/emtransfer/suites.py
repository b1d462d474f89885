"""Verification suites run by the harness.

Each suite is a function ``ctx -> SuiteResult`` registered with its default
parameters and a validator.  Validators raise :class:`ConfigError` naming the
hypothesis that a parameter choice violates, before anything is computed.
"""

from __future__ import annotations

import warnings
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import appendix, scaling
from .bounds import (
    BoundReport, CSV_HEADER, DomainError, RadialSmearing, corollary_plane_limit, corollary_point_limit,
    commutator_envelope_check, default_energies, far_plane_offset, far_point, gaussian_grid_measure, gaussian_hat,
    generic_plane_offset, generic_point, geometric_gammas, random_fields, random_gaussian_profile, random_measure,
    require_sobolev_order, require_theorem_order, require_weight, sobolev_bound_check, sobolev_exponent,
    stability_check, theorem_Bk_check, theorem_GB_check, weighted_bound_check,
)
from .dyadic import Mollifier, telescoping_check
from .fractional import Signal, derivative_from_parts, relative_l2_error
from .spacetime import EnvelopeParams
from .toymodel import (
    G_minus, G_plus, G_t, QuantumModel, buchholz_check, dyadic_operator_split, frequency_parts, generate,
    jordan_block, operator_norm, random_cone_model, random_field, random_lemma_matrix, time_domain_parts,
)
from .toymodel.buchholz import ThresholdAmbiguity
from .toymodel.spectrum import bundled_mass_shell


class ConfigError(ValueError):
    """A configuration value lies outside the hypotheses of the suite it feeds."""


# --- results ------------------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


@dataclass
class Table:
    header: list
    rows: list = field(default_factory=list)


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    curves: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, **detail):
        self.checks.append(Check(name, bool(passed), detail))

    def add_report(self, rep: BoundReport):
        self.checks.append(Check(f"{rep.experiment}/{rep.family}", rep.passed, rep.summary()))
        self.tables.setdefault("instances", Table(list(CSV_HEADER))).rows.extend(rep.csv_rows())

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "params": self.params,
            "checks": [c.to_json() for c in self.checks],
            "tables": sorted(self.tables),
            "curves": self.curves,
        }


# --- context ------------------------------------------------------------------------------------


@dataclass
class SuiteContext:
    suite: str
    seed: int
    params: dict
    model: QuantumModel

    def rng(self, *key: int) -> np.random.Generator:
        """Stream for instance ``key``: independent of how many other instances are drawn."""
        return instance_rng(self.seed, self.suite, *key)


def instance_rng(seed: int, suite: str, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(zlib.crc32(suite.encode()), *map(int, key)))
    return np.random.default_rng(ss)


# --- weights ------------------------------------------------------------------------------------


def make_weight(spec: dict):
    kind = spec.get("kind", "plus")
    lam = float(spec.get("lam", 1.0))
    try:
        if kind == "plus":
            return G_plus(float(spec.get("s", 1.0)), lam)
        if kind == "minus":
            return G_minus(float(spec.get("a", 0.25)), float(spec.get("b", 0.5)), lam)
        if kind == "t":
            return G_t(float(spec.get("s", 1.0)), lam)
    except ValueError as exc:
        raise ConfigError(f"energy weight {spec}: {exc}") from None
    raise ConfigError(f"unknown energy weight kind {kind!r}")


def _weight_for(spec: dict, variant: str):
    w = make_weight(spec)
    try:
        require_weight(w, variant)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return w


def family_model(kind: str, ctx: SuiteContext, index: int) -> QuantumModel:
    dim = int(ctx.params.get("family_dim", 12))
    if kind == "model":
        return ctx.model
    if kind == "mass-shell":
        return bundled_mass_shell()
    seed = int(ctx.rng(10_000, index).integers(2**31))
    return generate(kind, dim, seed)


# --- suites -------------------------------------------------------------------------------------


def suite_buchholz(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("buchholz")
    lo, hi = p["dims"]
    table = Table(["trial", "dim", "n", "lhs1", "rhs1", "lhs2", "rhs2", "passed"])
    bad = 0
    ambiguous = 0
    for i in range(int(p["trials"])):
        rng = ctx.rng(i)
        d = int(rng.integers(lo, hi + 1))
        n = int(rng.choice(p["orders"]))
        c = random_lemma_matrix(d, rng)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ThresholdAmbiguity)
            r = buchholz_check(c, n)
        ambiguous += sum(issubclass(w.category, ThresholdAmbiguity) for w in caught)
        bad += not r.passed
        table.rows.append([i, d, n, r.lhs1, r.rhs1, r.lhs2, r.rhs2, r.passed])
    res.tables["trials"] = table
    res.add("random-matrices", bad == 0, trials=int(p["trials"]), violations=bad, threshold_warnings=ambiguous)
    j = buchholz_check(jordan_block(2), 2)
    res.add("jordan-equality", j.passed and abs(j.lhs1 - j.rhs1) <= 1e-12,
            lhs1=j.lhs1, rhs1=j.rhs1, lhs2=j.lhs2, rhs2=j.rhs2)
    return res


def suite_dyadic(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("dyadic")
    table = Table(["k", "N", "ratio", "expected", "tolerance", "pass"])
    moll = Mollifier(float(p["lam"]))
    for k in p["ks"]:
        for n in p["Ns"]:
            r = telescoping_check(float(k), int(n), moll)
            table.rows.append([r.k, r.N, r.ratio, r.expected, r.tolerance, r.passed])
            res.add(f"telescoping/k={k}/N={n}", r.passed, ratio=r.ratio, expected=r.expected,
                    error=abs(r.ratio - r.expected), edge_error=r.edge_error)
    res.tables["telescoping"] = table
    return res


def band_limited_signal(rng: np.random.Generator, n: int = 512, period: float = 2 * np.pi, modes: int = 6):
    """Zero-mean trigonometric polynomial on a periodic grid, with exact first and second derivatives."""
    t = period * np.arange(n) / n
    m = rng.choice(np.r_[-n // 4:0, 1:n // 4], size=modes, replace=False)
    w = 2 * np.pi * m / period
    a = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    basis = np.exp(1j * np.outer(t, w))
    derivs = [basis @ (a * (1j * w) ** order) for order in (0, 1, 2)]
    return Signal(derivs[0], 0.0, period / n), derivs[1], derivs[2]


def suite_derivative(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("derivative")
    table = Table(["kind", "index", "order", "error"])
    worst = {1: 0.0, 2: 0.0}
    for i in range(int(p["signals"])):
        sig, d1, d2 = band_limited_signal(ctx.rng(0, i))
        for order, exact in ((1, d1), (2, d2)):
            err = relative_l2_error(derivative_from_parts(sig, order, pad=1), Signal(exact, sig.t0, sig.dt))
            worst[order] = max(worst[order], err)
            table.rows.append(["signal", i, order, err])
    tol = float(p["reconstruction_tol"])
    res.add("reconstruction", max(worst.values()) < tol, first=worst[1], second=worst[2], tolerance=tol)
    quantum = float(p["energy_quantum"])
    period = 2 * np.pi / quantum
    worst_field = 0.0
    for i in range(int(p["fields"])):
        rng = ctx.rng(1, i)
        model = random_cone_model(int(p["field_dim"]), rng, energy_quantum=quantum)
        b = random_field(model, rng)
        for k in p["ks"]:
            closed = frequency_parts(b, float(k))
            sampled = time_domain_parts(b, float(k), period)
            for sign, a, s in zip("+-", closed, sampled):
                err = operator_norm(a.matrix - s.matrix) / max(a.norm(), 1e-300)
                worst_field = max(worst_field, err)
                table.rows.append([f"field{sign}", i, k, err])
    ftol = float(p["bohr_fft_tol"])
    res.add("bohr-vs-fft", worst_field < ftol, worst=worst_field, tolerance=ftol, fields=int(p["fields"]))
    res.tables["errors"] = table
    return res


def suite_dyadic_split(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("dyadic-split")
    table = Table(["field", "k", "N", "reconstruction", "residual", "bound"])
    moll = Mollifier(float(p["lam"]))
    worst_rec, worst_ratio = 0.0, 0.0
    for i in range(int(p["fields"])):
        b = random_field(ctx.model, ctx.rng(i))
        for k in p["ks"]:
            for n in p["Ns"]:
                s = dyadic_operator_split(b, float(k), int(n), moll)
                rec = s.reconstruction_error()
                worst_rec = max(worst_rec, rec)
                worst_ratio = max(worst_ratio, s.residual_norm / s.bound if s.bound > 0 else 0.0)
                table.rows.append([i, k, n, rec, s.residual_norm, s.bound])
    res.add("reconstruction", worst_rec <= 1e-10, worst=worst_rec)
    res.add("residual-bound", worst_ratio <= 1.0 + 1e-12, worst_ratio=worst_ratio)
    res.tables["split"] = table
    return res


def _envelope(p) -> EnvelopeParams:
    return EnvelopeParams(float(p["lam"]), float(p["kappa"]))


def _measures(ctx: SuiteContext, tag: int, count: int, max_atoms: int = 10):
    out = []
    for j in range(count):
        rng = ctx.rng(tag, j)
        out.append(random_measure(rng, int(rng.integers(1, max_atoms + 1))))
    return out


def _fields(ctx: SuiteContext, model: QuantumModel, tag: int, count: int):
    return [random_field(model, ctx.rng(tag, j)) for j in range(count)]


def suite_thm_bk(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("thm-bk")
    env = _envelope(p)
    for fi, kind in enumerate(p["families"]):
        model = family_model(kind, ctx, fi)
        fields = _fields(ctx, model, 100 + fi, int(p["fields"]))
        measures = _measures(ctx, 200 + fi, int(p["measures"]))
        energies = default_energies(model, int(p["energies"]))
        rep = theorem_Bk_check(fields, measures, float(p["k"]), env, energies, convention=p["convention"],
                               family=kind, split=p["split"], margin=float(p["margin"]))
        res.add_report(rep)
    return res


def suite_thm_gb(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("thm-gb")
    env = _envelope(p)
    for fi, kind in enumerate(p["families"]):
        model = family_model(kind, ctx, fi)
        fields = _fields(ctx, model, 100 + fi, int(p["fields"]))
        measures = _measures(ctx, 200 + fi, int(p["measures"]))
        for variant, spec in p["weights"].items():
            rep = theorem_GB_check(fields, measures, float(p["k"]), env, make_weight(spec), variant=variant,
                                   convention=p["convention"], family=f"{kind}/{variant}", split=p["split"],
                                   margin=float(p["margin"]))
            res.add_report(rep)
    return res


def suite_envelope(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("envelope")
    fields = _fields(ctx, ctx.model, 0, int(p["fields"]))
    pairs = []
    for i, b in enumerate(fields):
        nu1, nu2 = _measures(ctx, 1 + i, 2)
        pairs.append((b, b.adjoint(), nu1, nu2))
    res.add_report(commutator_envelope_check(pairs, _envelope(p), family=ctx.model.name))
    return res


def suite_stability(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("stability")
    fields = _fields(ctx, ctx.model, 0, int(p["fields"]))
    chis = [RadialSmearing(**spec) for spec in p["smearings"]]
    rep = stability_check(fields, chis, _envelope(p), widen=float(p["widen"]), max_drift=float(p["max_drift"]),
                          family=ctx.model.name)
    res.add_report(rep)
    return res


def suite_sobolev(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("sobolev")
    fields = _fields(ctx, ctx.model, 0, int(p["fields"]))
    weight = make_weight(p["weight"])
    for ci, case in enumerate(p["cases"]):
        ms = []
        for si, scale in enumerate(p["scales"]):
            for j in range(int(p["per_scale"])):
                rng = ctx.rng(1 + ci, si, j)
                ms.append(gaussian_grid_measure(rng.normal(), rng.normal(size=3), rng.uniform(0.5, 2.0),
                                                rng.normal(size=3), scale=float(scale)))
        rep = sobolev_bound_check(fields, ms, float(case["k"]), float(case["kappa"]), weight, p["variant"],
                                  family=f"{ctx.model.name}/kappa={case['kappa']}", split=p["split"],
                                  margin=float(p["margin"]))
        res.add_report(rep)
    return res


def suite_weighted(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("weighted")
    fields = _fields(ctx, ctx.model, 0, int(p["fields"]))
    weight = make_weight(p["weight"])
    n = int(p["profiles"])
    for ci, case in enumerate(p["cases"]):
        centred = case["form"] == "Bfitwo"
        profiles = [random_gaussian_profile(ctx.rng(1 + ci, j), spatially_centred=centred) for j in range(n)]
        rep = weighted_bound_check(fields, profiles, float(case["k"]), float(case["kappa"]), weight,
                                   case["form"], sigma=case.get("sigma"), beta=case.get("beta"),
                                   tau=case.get("tau"), lam=float(p["lam"]), variant=p["variant"],
                                   family=f"{ctx.model.name}/kappa={case['kappa']}", split=p["split"],
                                   margin=float(p["margin"]))
        res.add_report(rep)
    return res


def _curve_check(res: SuiteResult, label: str, curve):
    res.add(label, curve.passed, final_over_initial=curve.final_over_initial, threshold=curve.threshold,
            no_late_growth=curve.no_late_growth, initial=float(curve.values[0]))
    res.curves.append({"label": label, "x": curve.gammas.tolist(), "y": curve.values.tolist()})
    table = res.tables.setdefault("curves", Table(["curve", "gamma", "value"]))
    table.rows.extend([label, g, v] for g, v in zip(curve.gammas.tolist(), curve.values.tolist()))


def suite_corollary_point(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("corollary-point")
    weight = make_weight(p["weight"])
    gammas = geometric_gammas(float(p["gamma_max"]), int(p["per_decade"]))
    for i in range(int(p["fields"])):
        rng = ctx.rng(i)
        b = random_field(ctx.model, rng)
        q = generic_point(ctx.model, rng, gamma_max=float(p["gamma_max"]), delta=float(p["delta"]))
        c = corollary_point_limit(b, float(p["k"]), q, float(p["delta"]), weight, gaussian_hat(p["probe_width"]),
                                  gammas, float(p["generic_threshold"]))
        _curve_check(res, f"generic/f{i}", c)
        cf = corollary_point_limit(b, float(p["k"]), far_point(ctx.model), float(p["delta"]), weight,
                                   gaussian_hat(p["far_probe_width"]), gammas, float(p["far_threshold"]))
        _curve_check(res, f"far/f{i}", cf)
    return res


def suite_corollary_plane(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("corollary-plane")
    weight = make_weight(p["weight"])
    gammas = geometric_gammas(float(p["gamma_max"]), int(p["per_decade"]))
    normal = np.asarray(p["normal"], dtype=float)
    for i in range(int(p["fields"])):
        rng = ctx.rng(i)
        b = random_field(ctx.model, rng)
        r = generic_plane_offset(ctx.model, normal, rng, gamma_max=float(p["gamma_max"]))
        c = corollary_plane_limit(b, float(p["k"]), normal, r, weight, gaussian_hat(p["probe_width"]), gammas,
                                  float(p["generic_threshold"]))
        _curve_check(res, f"generic/f{i}", c)
        cf = corollary_plane_limit(b, float(p["k"]), normal, far_plane_offset(ctx.model, normal), weight,
                                   gaussian_hat(p["probe_width"]), gammas, float(p["far_threshold"]))
        _curve_check(res, f"far/f{i}", cf)
    return res


def suite_scaling(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("scaling")
    tol = float(p["tolerance"])
    table = Table(["object", "expected", "estimate", "stable"])
    for m in p["delta_dims"]:
        est = scaling.estimate_degree(scaling.DeltaCombination(int(m)).evaluator())
        table.rows.append([f"delta/m={m}", -m, est.degree, est.stable])
        res.add(f"delta/m={m}", abs(est.degree + m) <= tol and est.stable, estimate=est.degree, expected=-m)
    for a in p["homogeneous"]:
        est = scaling.estimate_degree(scaling.Homogeneous(float(a)).evaluator())
        table.rows.append([f"homogeneous/a={a}", a, est.degree, est.stable])
        res.add(f"homogeneous/a={a}", abs(est.degree - a) <= tol and est.stable, estimate=est.degree, expected=a)
    res.tables["estimates"] = table
    cls = Table(["kappa", "m", "l", "at_zero"])
    for kappa in p["kappas"]:
        out = scaling.classify_allowed_singularities(float(kappa))
        cls.rows.extend([kappa, s.m, s.l, s.at_zero] for s in out)
    res.tables["classification"] = cls
    res.add("classifier-consistency", classifier_consistent(p["kappas"]), kappas=list(p["kappas"]))
    res.checks.extend(scaling_operator_checks(p).checks)
    return res


def classifier_consistent(kappas, max_order: int = 3) -> bool:
    """Listed (m, l) pairs are exactly those with -m - l >= the kappa-type degree bound."""
    for kappa in kappas:
        listed = {(s.m, s.l) for s in scaling.classify_allowed_singularities(float(kappa), max_order)
                  if not s.at_zero}
        for m in range(1, 5):
            bound = scaling.degree_lower_bounds(m, float(kappa))
            for l in range(max_order + 1):
                if ((m, l) in listed) != (-m - l >= bound - 1e-12):
                    return False
    return True


def family_from_params(p: dict, mass: float) -> scaling.ScalingFamily:
    """Scaling family from config: chart coefficients and bump-profile parameters."""
    q = tuple(p.get("q") or scaling.shell_point(mass, (0.0, 0.0, 0.0)).tolist())
    if p.get("chart"):
        chart = scaling.PolynomialChart.from_json(p["chart"])
    else:
        chart = scaling.mass_shell_chart(mass)
    prof = p.get("profile", {})
    psi = scaling.Profile(float(prof.get("radius", 1.0)), float(prof.get("shift", 0.3)))
    try:
        return scaling.ScalingFamily(q, chart, psi, float(p.get("sigma_radius", 0.2)), float(p.get("window", 0.5)))
    except scaling.ChartDomainError as exc:
        raise ConfigError(f"scaling family: {exc}") from None


def scaling_operator_checks(p: dict) -> SuiteResult:
    """Degree of the engineered on-shell operator and the smearing monotonicity remark."""
    res = SuiteResult("scaling-operator")
    mass = float(p.get("mass", 1.0))
    eng = scaling.engineered_shell_model(mass)
    fam = family_from_params(p, mass)
    est = scaling.estimate_degree(scaling.operator_evaluator(eng.field, fam))
    bound = scaling.degree_lower_bounds(fam.m)
    res.add("engineered-shell/degree-bound", est.degree >= bound - float(p["tolerance"]),
            estimate=scaling._json_float(est.degree), lower_bound=bound)
    mono = scaling.remark_monotonicity_check(eng.field, scaling.cancelling_measure(np.asarray(fam.q)), fam)
    res.add("smearing-monotone", mono.passed, before=scaling._json_float(mono.before.degree),
            after=scaling._json_float(mono.after.degree))
    return res


def suite_appendix_a(ctx: SuiteContext) -> SuiteResult:
    p = ctx.params
    res = SuiteResult("appendix-a")
    table = Table(["gamma", "lam", "level", "constant"])
    for gamma in p["gammas"]:
        for lam in p["lams"]:
            f = appendix.gaussian_singular(float(gamma), float(lam))
            ref = appendix.decay_refinement(f, float(gamma), 1, float(lam), int(p["doublings"]),
                                            float(p["max_drift"]))
            table.rows.extend([gamma, lam, j, c] for j, c in enumerate(ref.constants))
            spots = appendix.derivative_spot_check(f, float(gamma), float(lam), rng=ctx.rng(0),
                                                  samples=int(p["samples"]))
            res.add(f"decay/gamma={gamma}/lam={lam}", ref.passed, constants=list(ref.constants),
                    drift=ref.max_drift, derivative_spot_check={str(k): v for k, v in spots.items()})
    res.tables["constants"] = table
    return res


def suite_appendix_b(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("appendix-b")
    table = Table(["trial", "s", "eps", "lhs", "rhs", "pass"])
    bad = 0
    for i in range(int(ctx.params["trials"])):
        f, h, s, eps, mu = appendix.random_interpolation_instance(ctx.rng(i))
        r = appendix.interpolation_check(f, h, s, eps, mu)
        bad += not r.passed
        table.rows.append([i, s, eps, r.lhs, r.rhs, r.passed])
    res.tables["trials"] = table
    res.add("interpolation", bad == 0, trials=int(ctx.params["trials"]), violations=bad)
    return res


def suite_appendix_c(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("appendix-c")
    table = Table(["trial", "lhs", "rhs", "pass", "step_converges"])
    bad = 0
    stuck = 0
    for i in range(int(ctx.params["trials"])):
        rng = ctx.rng(i)
        pair = appendix.random_dominance_pair(rng)
        f = appendix.random_nonincreasing_step(rng)
        r = appendix.dominance_integral_check(pair, f)
        bad += not r.passed
        stuck += not r.step_converges
        table.rows.append([i, r.lhs, r.rhs, r.passed, r.step_converges])
    res.tables["trials"] = table
    res.add("dominance", bad == 0, trials=int(ctx.params["trials"]), violations=bad)
    res.add("step-approximation", stuck == 0, failures=stuck)
    return res


# --- validators ---------------------------------------------------------------------------------


def _domain(suite: str, fn, *args):
    try:
        fn(*args)
    except DomainError as exc:
        raise ConfigError(f"{suite}: {exc}") from None


def validate_thm(suite: str, p: dict):
    _domain(suite, require_theorem_order, float(p["k"]), float(p["kappa"]))
    if p.get("convention", "raising") not in ("raising", "lowering"):
        raise ConfigError(f"{suite}: convention must be 'raising' or 'lowering'")
    if suite == "thm-gb":
        for variant, spec in p["weights"].items():
            if variant not in ("+", "-", "t"):
                raise ConfigError(f"{suite}: unknown variant {variant!r}")
            _weight_for(spec, variant)


def validate_sobolev(suite: str, p: dict):
    _weight_for(p["weight"], p["variant"])
    for case in p["cases"]:
        _domain(suite, sobolev_exponent, float(case["kappa"]))
        _domain(suite, require_sobolev_order, float(case["k"]), float(case["kappa"]))


def validate_weighted(suite: str, p: dict):
    _weight_for(p["weight"], p["variant"])
    for case in p["cases"]:
        if case["form"] not in ("Bfi", "Bvp", "Bfitwo"):
            raise ConfigError(f"{suite}: unknown weighted form {case['form']!r}")
        kappa, k = float(case["kappa"]), float(case["k"])
        if case["form"] == "Bvp" and not kappa > 3:
            raise ConfigError(f"{suite}: spectral weighted form requires kappa > 3")
        if case["form"] == "Bfitwo" and not kappa < 3:
            raise ConfigError(f"{suite}: space-time weighted form requires kappa < 3")
        if case["form"] == "Bfitwo":
            _domain(suite, require_theorem_order, k, kappa)
        else:
            _domain(suite, require_sobolev_order, k, kappa)


def validate_corollary(suite: str, p: dict):
    if "delta" in p and not 0 < float(p["delta"]) < 1:
        raise ConfigError(f"{suite}: anisotropy exponent delta must lie in (0, 1); got {p['delta']}")
    if not float(p["k"]) > 0.5:
        raise ConfigError(f"{suite}: decay corollaries need k > 1/2; got {p['k']}")
    if float(p["gamma_max"]) <= 1:
        raise ConfigError(f"{suite}: gamma_max must exceed 1")
    _weight_for(p["weight"], "t")


def validate_stability(suite: str, p: dict):
    for spec in p["smearings"]:
        chi = RadialSmearing(**spec)
        if chi.profile == "power":
            need = (4 if chi.dim == 4 else 1) + float(p["kappa"])
            if chi.exponent < need:
                raise ConfigError(f"{suite}: smearing decay exponent {chi.exponent} below the required {need}")


def validate_dyadic(suite: str, p: dict):
    if any(not float(k) > 0 for k in p["ks"]):
        raise ConfigError(f"{suite}: k must be positive")
    if any(int(n) < (1 if suite == "dyadic" else 0) for n in p["Ns"]):
        raise ConfigError(f"{suite}: N out of range")


def validate_nothing(suite: str, p: dict):
    pass


# --- registry -----------------------------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    run: Callable
    defaults: dict
    validate: Callable = validate_nothing


_G_PLUS = {"kind": "plus", "s": 1.0}
_G_MINUS = {"kind": "minus", "a": 0.25, "b": 0.5}
_G_T = {"kind": "t", "s": 1.0}
_THM = {"k": 1.5, "kappa": 1.0, "lam": 1.0, "families": ["random-cone", "lattice", "mass-shell"],
        "family_dim": 12, "fields": 5, "measures": 10, "convention": "raising", "split": "alternate", "margin": 2.0}

SUITES: dict[str, Suite] = {
    "buchholz": Suite(suite_buchholz, {"trials": 1000, "dims": [2, 16], "orders": [1, 2, 3, 4]}),
    "dyadic": Suite(suite_dyadic, {"ks": [1.0, 1.5, 2.0], "Ns": list(range(1, 9)), "lam": 1.0}, validate_dyadic),
    "derivative": Suite(suite_derivative, {"signals": 10, "fields": 20, "field_dim": 8, "ks": [0.5, 1.0, 1.5, 2.0],
                                           "energy_quantum": 0.25, "reconstruction_tol": 1e-8,
                                           "bohr_fft_tol": 1e-6}),
    "dyadic-split": Suite(suite_dyadic_split, {"fields": 20, "ks": [1.0, 1.5, 2.0], "Ns": list(range(0, 7)),
                                               "lam": 1.0}, validate_dyadic),
    "thm-bk": Suite(suite_thm_bk, dict(_THM, energies=5), validate_thm),
    "thm-gb": Suite(suite_thm_gb, dict(_THM, fields=10, measures=50,
                                       weights={"+": _G_PLUS, "-": _G_MINUS, "t": _G_T}), validate_thm),
    "envelope": Suite(suite_envelope, {"fields": 3, "lam": 1.0, "kappa": 1.0}),
    "stability": Suite(suite_stability, {
        "fields": 3, "lam": 1.0, "kappa": 1.0, "widen": 2.0, "max_drift": 0.2,
        "smearings": [{"exponent": 5.0, "cutoff": 16.0}, {"exponent": 6.0, "cutoff": 16.0},
                      {"exponent": 1.0, "cutoff": 8.0, "profile": "gaussian"},
                      {"exponent": 2.5, "cutoff": 16.0, "dim": 1}]}, validate_stability),
    "sobolev": Suite(suite_sobolev, {"fields": 3, "weight": _G_T, "variant": "t", "split": "ordered",
                                     "margin": 2.0, "scales": [1.0, 2.0, 4.0, 8.0], "per_scale": 5,
                                     "cases": [{"k": 1.6, "kappa": 2.0}, {"k": 2.5, "kappa": 4.0}]},
                     validate_sobolev),
    "weighted": Suite(suite_weighted, {
        "fields": 5, "profiles": 100, "weight": _G_T, "variant": "t", "lam": 1.0, "split": "alternate",
        "margin": 2.0,
        "cases": [{"form": "Bfi", "k": 2.5, "kappa": 4.0, "sigma": 0.6},
                  {"form": "Bfi", "k": 1.6, "kappa": 2.0, "sigma": 0.6},
                  {"form": "Bvp", "k": 2.5, "kappa": 4.0, "sigma": 0.6},
                  {"form": "Bfitwo", "k": 1.6, "kappa": 2.0, "beta": 0.6, "tau": 0.6}]}, validate_weighted),
    "corollary-point": Suite(suite_corollary_point, {
        "fields": 3, "k": 1.0, "delta": 0.5, "weight": _G_T, "gamma_max": 100.0, "per_decade": 4,
        "probe_width": 0.1, "far_probe_width": 1.0, "generic_threshold": 0.1, "far_threshold": 1e-3},
        validate_corollary),
    "corollary-plane": Suite(suite_corollary_plane, {
        "fields": 3, "k": 1.0, "weight": _G_T, "gamma_max": 100.0, "per_decade": 4, "normal": [0.0, 1.0, 0.0, 0.0],
        "probe_width": 1.0, "generic_threshold": 0.1, "far_threshold": 1e-3}, validate_corollary),
    "scaling": Suite(suite_scaling, {"delta_dims": [1, 2, 3, 4], "homogeneous": [-0.5, 0.0, 0.5], "tolerance": 0.1,
                                     "kappas": [0.5, 0.9, 1.0, 1.5, 1.8, 2.0, 2.5, 3.0, 3.5], "mass": 1.0}),
    "appendix-a": Suite(suite_appendix_a, {"gammas": [0.5], "lams": [0.5, 1.0, 2.0], "doublings": 2,
                                           "max_drift": 0.1, "samples": 10}),
    "appendix-b": Suite(suite_appendix_b, {"trials": 1000}),
    "appendix-c": Suite(suite_appendix_c, {"trials": 1000}),
}

DEFAULT_SUITES = list(SUITES)


def resolve_params(name: str, overrides: dict | None) -> dict:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    params = {**SUITES[name].defaults, **(overrides or {})}
    unknown = set(overrides or {}) - set(SUITES[name].defaults) - OPTIONAL_KEYS.get(name, set())
    if unknown:
        raise ConfigError(f"{name}: unknown parameters {sorted(unknown)}")
    SUITES[name].validate(name, params)
    return params


OPTIONAL_KEYS = {"scaling": {"q", "chart", "profile", "sigma_radius", "window"}}
