"""Acceptance criteria 1-9, evaluated on one run of the default configuration.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary (see conftest.py) so they survive output capture.
"""

import time

import numpy as np
import pytest

from emtransfer.harness import ExperimentConfig, canonical_json, run
from emtransfer.scaling import classify_allowed_singularities
from emtransfer.toymodel import buchholz_check, jordan_block

from .test_scaling import ORACLE

RESULTS: dict[int, tuple[bool, str]] = {}


def verdict(n: int, ok: bool, msg: str):
    RESULTS[n] = (bool(ok), msg)
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {msg}")
    assert ok, msg


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("default")
    t0 = time.perf_counter()
    rec = run(ExperimentConfig(out=str(out)))
    return rec, out, time.perf_counter() - t0


def suite(rec, name):
    return next(s for s in rec.suites if s["suite"] == name)


def checks(rec, name, prefix=""):
    return [c for c in suite(rec, name)["checks"] if c["name"].startswith(prefix)]


def test_criterion_1_buchholz(default_run):
    rec, _, _ = default_run
    c = checks(rec, "buchholz", "random-matrices")[0]
    elapsed = rec.timings["buchholz"]
    j = buchholz_check(jordan_block(2), 2)
    jordan = abs(j.lhs1 - j.rhs1) < 1e-12 and abs(j.rhs1 - 1.0) < 1e-12
    ok = c["passed"] and c["detail"]["trials"] >= 1000 and elapsed < 10.0 and jordan
    verdict(1, ok, f"{c['detail']['violations']} violations in {c['detail']['trials']} trials, "
                   f"{elapsed:.2f} s; Jordan equality {jordan}")


def test_criterion_2_telescoping(default_run):
    rec, _, _ = default_run
    cs = checks(rec, "dyadic", "telescoping/")
    worst = max(c["detail"]["error"] for c in cs)
    table = next(r for r in rec.results if r.suite == "dyadic").tables["telescoping"]
    pairs = {(float(row[0]), int(row[1])) for row in table.rows}
    want = {(k, n) for k in (1.0, 1.5, 2.0) for n in range(1, 9)}
    ok = all(c["passed"] for c in cs) and pairs == want and worst < 1e-4
    verdict(2, ok, f"{len(cs)} (k, N) pairs, worst |ratio - 2^-Nk| = {worst:.2e}")


def test_criterion_3_derivatives(default_run):
    rec, _, _ = default_run
    rc = checks(rec, "derivative", "reconstruction")[0]
    bf = checks(rec, "derivative", "bohr-vs-fft")[0]
    err = max(rc["detail"]["first"], rc["detail"]["second"])
    ok = rc["passed"] and bf["passed"] and err < 1e-8 and bf["detail"]["worst"] <= 1e-6 \
        and bf["detail"]["fields"] >= 20
    verdict(3, ok, f"reconstruction {err:.1e}, Bohr vs FFT {bf['detail']['worst']:.1e} "
                   f"on {bf['detail']['fields']} fields")


def test_criterion_4_decay_theorems(default_run):
    rec, _, _ = default_run
    cs = checks(rec, "thm-bk") + checks(rec, "thm-gb")
    fams = {c["detail"]["family"].split("/")[0] for c in cs}
    worst = max(c["detail"]["holdout_sup"] / c["detail"]["calibration_sup"] for c in cs)
    enough = all(c["detail"]["instances"] >= 500 for c in cs)
    annihilate = all(c["detail"]["checks"]["minus-annihilates-zero-energy"] for c in checks(rec, "thm-bk"))
    ok = all(c["passed"] for c in cs) and fams == {"random-cone", "lattice", "mass-shell"} and enough \
        and worst <= 2.0 and annihilate
    verdict(4, ok, f"{len(cs)} reports over {len(fams)} model families, >= 500 instances each, worst holdout/calibration {worst:.3f}, "
                   f"minus part annihilates E = 0: {annihilate}")


def test_criterion_5_dyadic_split(default_run):
    rec, _, _ = default_run
    rc = checks(rec, "dyadic-split", "reconstruction")[0]
    rb = checks(rec, "dyadic-split", "residual-bound")[0]
    p = suite(rec, "dyadic-split")["params"]
    ok = rc["passed"] and rb["passed"] and rc["detail"]["worst"] <= 1e-10 and max(p["Ns"]) >= 6 \
        and p["fields"] >= 20
    verdict(5, ok, f"reconstruction {rc['detail']['worst']:.1e}, residual/bound {rb['detail']['worst_ratio']:.3f}")


def test_criterion_6_corollaries(default_run):
    rec, _, _ = default_run
    cs = checks(rec, "corollary-point") + checks(rec, "corollary-plane")
    generic = max(c["detail"]["final_over_initial"] for c in cs if c["name"].startswith("generic"))
    far = max(c["detail"]["final_over_initial"] for c in cs if c["name"].startswith("far"))
    ok = all(c["passed"] for c in cs) and generic < 0.1 and far < 1e-3
    verdict(6, ok, f"{len(cs)} curves; worst final/initial {generic:.1e} (generic), {far:.1e} (probe misses)")


def test_criterion_7_scaling(default_run):
    rec, _, _ = default_run
    est = checks(rec, "scaling", "delta/") + checks(rec, "scaling", "homogeneous/")
    worst = max(abs(c["detail"]["estimate"] - c["detail"]["expected"]) for c in est)
    table = all(sorted((s.m, s.l) for s in classify_allowed_singularities(k) if not s.at_zero) == v
                for k, v in ORACLE.items())
    ok = suite(rec, "scaling")["passed"] and len(est) == 7 and worst <= 0.1 and table
    verdict(7, ok, f"worst degree error {worst:.1e}; classifier matches enumeration for {len(ORACLE)} kappas: {table}")


def test_criterion_8_appendix(default_run):
    rec, _, _ = default_run
    b = checks(rec, "appendix-b")[0]["detail"]
    c = checks(rec, "appendix-c", "dominance")[0]["detail"]
    drift = max(x["detail"]["drift"] for x in checks(rec, "appendix-a", "decay/gamma=0.5"))
    ok = all(suite(rec, s)["passed"] for s in ("appendix-a", "appendix-b", "appendix-c")) \
        and b["violations"] == 0 and c["violations"] == 0 and min(b["trials"], c["trials"]) >= 1000 and drift < 0.1
    verdict(8, ok, f"interpolation {b['violations']}/{b['trials']}, dominance {c['violations']}/{c['trials']} "
                   f"violations; decay drift {drift:.1e}")


def test_criterion_9_determinism(default_run, tmp_path):
    rec, out, elapsed = default_run
    again = run(ExperimentConfig(out=str(tmp_path)))
    same = (out / "result.json").read_bytes() == (tmp_path / "result.json").read_bytes()
    ok = same and canonical_json(again.to_json()) == canonical_json(rec.to_json()) and rec.passed
    verdict(9, ok, f"result.json byte-identical on rerun: {same}; default suite {elapsed:.1f} s, "
                   f"all {rec.counts()['checks']} checks pass: {rec.passed}")
    assert elapsed < 60.0
    assert np.isfinite(elapsed)
