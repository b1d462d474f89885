"""Experiment configuration, deterministic run records, file outputs and reports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .plots import svg_loglog
from .suites import DEFAULT_SUITES, SUITES, ConfigError, SuiteContext, resolve_params
from .toymodel.spectrum import QuantumModel, bundled_mass_shell, generate

SCHEMA_VERSION = "1.0"


# --- JSON helpers -------------------------------------------------------------------------------


def jsonable(obj):
    """Plain-JSON copy: numpy scalars unwrapped, non-finite floats as strings, tuples as lists."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    return obj


def canonical_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("emtransfer").joinpath("schema/run_record.schema.json").read_text()
    return json.loads(text)


def validate_record(data: dict):
    jsonschema.validate(data, load_schema())


# --- configuration ------------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    kind: str = "bundled"
    dim: int = 32
    seed: int | None = None
    path: str | None = None

    KINDS = ("bundled", "random-cone", "lattice", "mass-shell", "file")

    def validate(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"model kind must be one of {self.KINDS}; got {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ConfigError("model kind 'file' needs a path")
        if self.kind not in ("bundled", "file") and self.dim < 2:
            raise ConfigError("model dimension must be at least 2")

    def build(self, seed: int) -> QuantumModel:
        if self.kind == "bundled":
            return bundled_mass_shell()
        if self.kind == "file":
            return QuantumModel.load(self.path)
        return generate(self.kind, int(self.dim), int(seed if self.seed is None else self.seed))

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "seed": self.seed, "path": self.path}


@dataclass
class ExperimentConfig:
    """Suites to run, the model they share, per-suite parameter overrides and output settings.

    ``out`` and ``plots`` do not enter the config hash.
    """

    name: str = "experiment"
    suites: list = field(default_factory=lambda: list(DEFAULT_SUITES))
    seed: int = 0
    model: ModelSpec = field(default_factory=ModelSpec)
    params: dict = field(default_factory=dict)
    out: str | None = None
    plots: bool = False

    def validate(self) -> dict:
        """Resolved parameters per suite; raises :class:`ConfigError` on the first violated hypothesis."""
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        self.model.validate()
        stray = set(self.params) - set(SUITES)
        if stray:
            raise ConfigError(f"parameters given for unknown suites {sorted(stray)}")
        return {s: resolve_params(s, self.params.get(s)) for s in self.suites}

    def hashed_part(self) -> dict:
        return {"name": self.name, "suites": list(self.suites), "seed": self.seed, "model": self.model.to_json(),
                "params": self.params}

    def config_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.hashed_part()).encode()).hexdigest()

    def to_json(self) -> dict:
        return {**self.hashed_part(), "out": self.out, "plots": self.plots}

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {"name", "suites", "seed", "model", "params", "out", "plots"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        model = ModelSpec(**data.get("model", {}))
        suites = data.get("suites", list(DEFAULT_SUITES))
        if isinstance(suites, str):
            suites = [suites]
        return cls(name=data.get("name", "experiment"), suites=list(suites), seed=int(data.get("seed", 0)),
                   model=model, params=dict(data.get("params", {})), out=data.get("out"),
                   plots=bool(data.get("plots", False)))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


# --- records ------------------------------------------------------------------------------------


@dataclass
class RunRecord:
    config_hash: str
    seed: int
    config: dict
    model: dict
    suites: list
    timings: dict = field(default_factory=dict)
    results: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(s["passed"] for s in self.suites)

    def counts(self) -> dict:
        checks = [c for s in self.suites for c in s["checks"]]
        return {"suites": len(self.suites), "suites_failed": sum(not s["passed"] for s in self.suites),
                "checks": len(checks), "checks_failed": sum(not c["passed"] for c in checks)}

    def to_json(self) -> dict:
        """Result document.  Timings live in a separate file so reruns are byte-identical."""
        return jsonable({
            "schema_version": SCHEMA_VERSION,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "config": self.config,
            "model": self.model,
            "suites": self.suites,
            "passed": self.passed,
            "summary": self.counts(),
        })

    def record_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_json()).encode()).hexdigest()


def run(config: ExperimentConfig) -> RunRecord:
    resolved = config.validate()
    model = config.model.build(config.seed)
    suites, results, timings = [], [], {}
    for name in config.suites:
        ctx = SuiteContext(name, config.seed, resolved[name], model)
        t0 = time.perf_counter()
        res = SUITES[name].run(ctx)
        timings[name] = time.perf_counter() - t0
        res.params = resolved[name]
        results.append(res)
        suites.append(jsonable(res.to_json()))
    record = RunRecord(config.config_hash(), config.seed, jsonable(config.hashed_part()),
                       {"name": model.name, "dim": model.dim}, suites, timings, results)
    validate_record(record.to_json())
    if config.out:
        write_outputs(record, config.out, config.plots)
    return record


def table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([jsonable(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_outputs(record: RunRecord, out_dir, plots: bool = False) -> dict:
    """result.json, timings.json, one CSV per suite table and optional SVG plots; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"result": out / "result.json", "timings": out / "timings.json", "csv": [], "svg": []}
    paths["result"].write_text(canonical_json(record.to_json()))
    paths["timings"].write_text(canonical_json({k: round(v, 6) for k, v in record.timings.items()}))
    for res in record.results:
        for tname, table in sorted(res.tables.items()):
            p = out / f"{res.suite}.{tname}.csv"
            p.write_text(table_csv(table.header, table.rows))
            paths["csv"].append(p)
        if plots and res.curves:
            p = out / f"{res.suite}.svg"
            p.write_text(svg_loglog(res.curves, title=res.suite))
            paths["svg"].append(p)
    return paths


def load_record(path) -> dict:
    data = json.loads(Path(path).read_text())
    validate_record(data)
    return data


# --- report -------------------------------------------------------------------------------------


def report(records, base_dir=None) -> str:
    """Markdown rollup: per-record suite tables with CSV links, per-suite counts, embedded decay plots.

    ``records`` holds :class:`RunRecord` objects or result dictionaries; CSV
    links and plots are resolved relative to ``base_dir`` when given (one
    directory per record, in order, or a single shared directory).
    """
    docs = [r.to_json() if isinstance(r, RunRecord) else r for r in records]
    dirs = base_dir if isinstance(base_dir, (list, tuple)) else [base_dir] * len(docs)
    lines = ["# Verification report", ""]
    rollup: dict = {}
    for doc, d in zip(docs, dirs):
        lines += [f"## {doc['config']['name']} (seed {doc['seed']}, config {doc['config_hash'][:12]})", "",
                  f"Model: {doc['model']['name']} (dim {doc['model']['dim']}). "
                  f"Overall: {'PASS' if doc['passed'] else 'FAIL'}.", "",
                  "| suite | checks passed | status | evidence |", "|---|---|---|---|"]
        for s in doc["suites"]:
            ok = sum(c["passed"] for c in s["checks"])
            n = len(s["checks"])
            suite = s["suite"]
            links = ", ".join(f"[{t}]({_rel(d, f'{suite}.{t}.csv')})" for t in s["tables"]) or "-"
            lines.append(f"| {s['suite']} | {ok}/{n} | {'PASS' if s['passed'] else 'FAIL'} | {links} |")
            r = rollup.setdefault(s["suite"], [0, 0])
            r[0] += s["passed"]
            r[1] += 1
        failed = [(s["suite"], c["name"]) for s in doc["suites"] for c in s["checks"] if not c["passed"]]
        if failed:
            lines += ["", "Failed checks:", ""] + [f"- {a}: {b}" for a, b in failed]
        lines.append("")
        for s in doc["suites"]:
            if s["curves"]:
                lines += [f"### {s['suite']} decay curves", "", svg_loglog(s["curves"], title=s["suite"]), ""]
    lines += ["## Rollup", "", "| suite | records passed |", "|---|---|"]
    for name in sorted(rollup):
        ok, n = rollup[name]
        lines.append(f"| {name} | {ok}/{n} |")
    return "\n".join(lines) + "\n"


def _rel(d, name: str) -> str:
    return name if d is None else str(Path(d) / name)


__all__ = ["ExperimentConfig", "ModelSpec", "RunRecord", "run", "report", "write_outputs", "load_record",
           "canonical_json", "jsonable", "validate_record", "ConfigError", "SCHEMA_VERSION"]
