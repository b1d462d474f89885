"""Command line entry point: ``emtransfer model|verify|scaling|report``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import scaling
from .bounds import default_energies
from .harness import ExperimentConfig, canonical_json, load_record, report, run, table_csv
from .spacetime import EnvelopeParams
from .suites import DEFAULT_SUITES, SUITES, ConfigError, family_from_params
from .toymodel import (
    OperatorField, QuantumModel, frequency_parts, generate, kappa_fit, random_field, spectral_projector,
)
from .toymodel.fields import default_kappa_grid, operator_norm

K_KEYS = {"dyadic": "ks", "dyadic-split": "ks", "derivative": "ks"}
TRIAL_KEYS = {"buchholz": "trials", "appendix-b": "trials", "appendix-c": "trials", "appendix-a": "samples"}


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(obj):
    sys.stdout.write(canonical_json(obj))


# --- model --------------------------------------------------------------------------------------


def cmd_model_gen(args) -> int:
    model = generate(args.kind, args.dim, args.seed)
    text = canonical_json(model.to_json())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_model_run(args) -> int:
    """Spectral diagnostics of one operator on one model."""
    model = QuantumModel.load(args.model)
    if args.operator:
        b = OperatorField.from_matrix_json(model, _read_json(args.operator))
    else:
        b = random_field(model, np.random.default_rng(args.seed))
    k = 1.0 if args.k is None else args.k
    plus, minus = frequency_parts(b, k)
    energies = default_energies(model)
    minus_zero = operator_norm(minus.matrix @ spectral_projector(model, 0.0))
    out = {
        "model": model.name,
        "dim": model.dim,
        "k": k,
        "norm": b.norm(),
        "plus_norm": plus.norm(),
        "minus_norm": minus.norm(),
        "minus_on_zero_energy": minus_zero,
        "kappa_constant": kappa_fit(b, EnvelopeParams(), default_kappa_grid()),
        "projected_plus_norms": {f"{e:.6g}": operator_norm(plus.matrix @ spectral_projector(model, e))
                                 for e in energies},
    }
    if args.out:
        Path(args.out).write_text(canonical_json(out))
    _emit(out)
    ok = not model.has_zero_energy or minus_zero <= 1e-12
    return 0 if ok else 1


# --- verify -------------------------------------------------------------------------------------


def build_config(args, suites) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if suites is not None:
        cfg.suites = suites
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.plots:
        cfg.plots = True
    for name in cfg.suites:
        over = dict(cfg.params.get(name, {}))
        if args.k is not None:
            if name in K_KEYS:
                over[K_KEYS[name]] = [args.k]
            elif "cases" in SUITES[name].defaults:
                over["cases"] = [dict(c, k=args.k) for c in over.get("cases", SUITES[name].defaults["cases"])]
            elif "k" in SUITES[name].defaults:
                over["k"] = args.k
        if args.N is not None and "Ns" in SUITES[name].defaults:
            over["Ns"] = [args.N]
        if args.trials is not None and name in TRIAL_KEYS:
            over[TRIAL_KEYS[name]] = args.trials
        if over:
            cfg.params[name] = over
    return cfg


def cmd_verify(args) -> int:
    suites = None if args.suite == "all" and args.config else (
        list(DEFAULT_SUITES) if args.suite == "all" else [args.suite])
    cfg = build_config(args, suites)
    record = run(cfg)
    for res in record.results:
        if res.suite == "dyadic":
            t = res.tables["telescoping"]
            sys.stdout.write(table_csv(t.header, t.rows))
        for c in res.checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {res.suite} {c.name}")
    s = record.counts()
    print(f"{'PASS' if record.passed else 'FAIL'}: {s['checks'] - s['checks_failed']}/{s['checks']} checks "
          f"in {s['suites']} suites (config {record.config_hash[:12]})")
    return 0 if record.passed else 1


# --- scaling ------------------------------------------------------------------------------------


def cmd_scaling_estimate(args) -> int:
    p = _read_json(args.config) if args.config else {}
    mass = float(p.get("mass", 1.0))
    if p.get("model"):
        model = QuantumModel.load(p["model"])
        if p.get("operator"):
            b = OperatorField.from_matrix_json(model, _read_json(p["operator"]))
        else:
            b = random_field(model, np.random.default_rng(0 if args.seed is None else args.seed))
    else:
        b = scaling.engineered_shell_model(mass).field
    fam = family_from_params(p, mass)
    gammas = scaling.gamma_grid(float(p.get("gamma_max", 1e3)), int(p.get("n_gamma", 12)))
    est = scaling.estimate_degree(scaling.operator_evaluator(b, fam), gammas)
    bound = scaling.degree_lower_bounds(fam.m)
    out = {"family": fam.describe(), "estimate": est.to_json(), "lower_bound": bound}
    if args.out:
        Path(args.out).write_text(canonical_json(out))
    _emit(out)
    return 0 if est.stable and est.degree >= bound - 0.1 else 1


def cmd_scaling_classify(args) -> int:
    kappas = args.kappa or SUITES["scaling"].defaults["kappas"]
    out = {f"{k:g}": [s.to_json() for s in scaling.classify_allowed_singularities(k)] for k in kappas}
    _emit(out)
    return 0


def cmd_scaling_bounds(args) -> int:
    out = {}
    for m in (args.m or [1, 2, 3, 4]):
        row = {"bare": scaling.degree_lower_bounds(m)}
        for k in args.kappa or []:
            row[f"kappa={k:g}"] = scaling.degree_lower_bounds(m, k)
        out[str(m)] = row
    _emit(out)
    return 0


# --- report -------------------------------------------------------------------------------------


def cmd_report(args) -> int:
    docs, dirs = [], []
    for item in args.records:
        path = Path(item)
        if path.is_dir():
            dirs.append(path)
            path = path / "result.json"
        else:
            dirs.append(path.parent)
        docs.append(load_record(path))
    text = report(docs, dirs)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if all(d["passed"] for d in docs) else 1


# --- parser -------------------------------------------------------------------------------------


def _common(p):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (verify) or file")
    p.add_argument("--plots", action="store_true", help="write SVG log-log plots")
    p.add_argument("--k", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--trials", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="emtransfer", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    model = sub.add_parser("model", help="generate or inspect finite models").add_subparsers(dest="verb",
                                                                                            required=True)
    gen = model.add_parser("gen")
    gen.add_argument("--kind", choices=["random-cone", "lattice", "mass-shell"], default="random-cone")
    gen.add_argument("--dim", type=int, default=12)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_model_gen)
    mrun = model.add_parser("run")
    mrun.add_argument("--model", required=True)
    mrun.add_argument("--operator")
    mrun.add_argument("--seed", type=int, default=0)
    mrun.add_argument("--k", type=float)
    mrun.add_argument("--out")
    mrun.set_defaults(func=cmd_model_run)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=["all", *SUITES])
    _common(ver)
    ver.set_defaults(func=cmd_verify)

    sc = sub.add_parser("scaling", help="momentum scaling degree tools").add_subparsers(dest="verb", required=True)
    est = sc.add_parser("estimate")
    est.add_argument("--config")
    est.add_argument("--seed", type=int)
    est.add_argument("--out")
    est.set_defaults(func=cmd_scaling_estimate)
    cl = sc.add_parser("classify")
    cl.add_argument("--kappa", type=float, action="append")
    cl.set_defaults(func=cmd_scaling_classify)
    bd = sc.add_parser("bounds")
    bd.add_argument("--m", type=int, action="append")
    bd.add_argument("--kappa", type=float, action="append")
    bd.set_defaults(func=cmd_scaling_bounds)

    rep = sub.add_parser("report", help="summarise result directories")
    rep.add_argument("records", nargs="+", help="result.json files or output directories")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, scaling.ChartDomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
