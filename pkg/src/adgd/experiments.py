"""Batch experiment harness: configs, runs, CSV traces, summaries, checks.

A config is flat key = value text with [section] headers: one [experiment]
section of shared settings and optional [run.NAME] sections pinning
individual (problem, rule) cells.  Without run sections the default matrix
is the adaptive proximal gradient method plus nine backtracking variants on
every selected problem.  Unknown keys and malformed lines are rejected with
their line number.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .accounting import CSV_COUNTER_FIELDS, essential_metric_name, essential_units_rows
from .core import ReferenceSolution
from .diagnostics import run_certificates
from .problems import (
    EXPERIMENT_KINDS,
    MAKERS,
    ProblemInstance,
    instance_descriptor,
    instance_from_descriptor,
    make_problem,
)
from .reference import make_reference
from .solvers import (
    AdGD1,
    AdGD2,
    Armijo,
    BadGD,
    FixedStep,
    OldAdGD,
    RunConfig,
    Trace,
    run_solver,
)
from .svgplot import gap_plot_svg

DEFAULT_ARMIJO_PAIRS = [
    (1.2, 0.5), (1.5, 0.8), (1.1, 0.5), (1.2, 0.9), (1.1, 0.9),
    (1.5, 0.5), (1.2, 0.8), (1.1, 0.8), (1.5, 0.9),
]

META_FORMAT = "adgd-run-meta-v1"


class ConfigError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        where = f" (line {lineno})" if lineno is not None else ""
        super().__init__(f"config error{where}: {message}")


# ---------------------------------------------------------------------------
# Rule (de)serialization
# ---------------------------------------------------------------------------

def rule_from_dict(d: dict):
    kind = d.get("kind")
    if kind in ("adproxgd", "adgd2"):
        return AdGD2()
    if kind == "adgd1":
        return AdGD1()
    if kind == "oldadgd":
        return OldAdGD()
    if kind == "fixed":
        return FixedStep(alpha=float(d["alpha"]))
    if kind == "armijo":
        return Armijo(s=float(d["s"]), r=float(d["r"]))
    if kind == "badgd":
        return BadGD(c=float(d.get("c", 1.0)))
    raise ConfigError(f"unknown rule kind {kind!r}")


def rule_to_dict(rule) -> dict:
    if isinstance(rule, AdGD2):
        return {"kind": "adgd2"}
    if isinstance(rule, AdGD1):
        return {"kind": "adgd1"}
    if isinstance(rule, OldAdGD):
        return {"kind": "oldadgd"}
    if isinstance(rule, FixedStep):
        return {"kind": "fixed", "alpha": rule.alpha}
    if isinstance(rule, Armijo):
        return {"kind": "armijo", "s": rule.s, "r": rule.r}
    if isinstance(rule, BadGD):
        return {"kind": "badgd", "c": rule.c}
    raise TypeError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class RunSpec:
    name: str
    problem: str
    rule: object


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    seed: int = 1
    scale: str = "desk"
    out: Path = Path("runs/experiment")
    plot: bool = True
    max_iter: int = 2000
    grad_tol: float = 1e-9
    alpha0: Union[float, str] = "search"
    reference: str = "auto"    # auto | none
    problems: List[str] = field(default_factory=lambda: list(EXPERIMENT_KINDS))
    runs: List[RunSpec] = field(default_factory=list)

    def resolved_runs(self) -> List[RunSpec]:
        if self.runs:
            return self.runs
        out = []
        for kind in self.problems:
            out.append(RunSpec(f"{kind}__adaptive", kind, AdGD2()))
            for s, r in DEFAULT_ARMIJO_PAIRS:
                out.append(RunSpec(f"{kind}__armijo_s{s:g}_r{r:g}", kind, Armijo(s, r)))
        return out


# ---------------------------------------------------------------------------
# Config text parsing
# ---------------------------------------------------------------------------

_EXPERIMENT_KEYS = {"name", "problem", "seed", "scale", "out", "plot",
                    "max_iter", "grad_tol", "alpha0", "reference"}
_RUN_KEYS = {"problem", "rule", "s", "r", "alpha", "c"}
_BOOL = {"yes": True, "true": True, "1": True, "no": False, "false": False, "0": False}


def _parse_sections(text: str):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", lineno)
            current = {"name": line[1:-1].strip(), "lineno": lineno, "items": {}}
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        if current is None:
            raise ConfigError("key outside of any [section]", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in current["items"]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        current["items"][key] = (value, lineno)
    return sections


def _want_float(value, lineno, key):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}", lineno)


def parse_config(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    runs = []
    seen_experiment = False
    for sec in _parse_sections(text):
        name, lineno, items = sec["name"], sec["lineno"], sec["items"]
        if name == "experiment":
            if seen_experiment:
                raise ConfigError("duplicate [experiment] section", lineno)
            seen_experiment = True
            for key, (value, ln) in items.items():
                if key not in _EXPERIMENT_KEYS:
                    raise ConfigError(f"unknown key {key!r} in [experiment]", ln)
                if key == "name":
                    cfg.name = value
                elif key == "problem":
                    kinds = [p.strip() for p in value.split(",")] \
                        if value != "all" else list(EXPERIMENT_KINDS)
                    for k in kinds:
                        if k not in MAKERS:
                            raise ConfigError(f"unknown problem {k!r}", ln)
                    cfg.problems = kinds
                elif key == "seed":
                    cfg.seed = int(_want_float(value, ln, key))
                elif key == "scale":
                    if value not in ("desk", "paper"):
                        raise ConfigError("scale must be desk or paper", ln)
                    cfg.scale = value
                elif key == "out":
                    cfg.out = Path(value)
                elif key == "plot":
                    if value.lower() not in _BOOL:
                        raise ConfigError("plot must be yes or no", ln)
                    cfg.plot = _BOOL[value.lower()]
                elif key == "max_iter":
                    cfg.max_iter = int(_want_float(value, ln, key))
                elif key == "grad_tol":
                    cfg.grad_tol = _want_float(value, ln, key)
                elif key == "alpha0":
                    cfg.alpha0 = "search" if value == "search" else _want_float(value, ln, key)
                elif key == "reference":
                    if value not in ("auto", "none"):
                        raise ConfigError("reference must be auto or none", ln)
                    cfg.reference = value
        elif name.startswith("run.") or name == "run":
            run_name = name[4:] or f"run{len(runs)}"
            rule_kind = None
            params = {}
            problem = None
            for key, (value, ln) in items.items():
                if key not in _RUN_KEYS:
                    raise ConfigError(f"unknown key {key!r} in [{name}]", ln)
                if key == "problem":
                    if value not in MAKERS:
                        raise ConfigError(f"unknown problem {value!r}", ln)
                    problem = value
                elif key == "rule":
                    rule_kind = value
                else:
                    params[key] = _want_float(value, ln, key)
            if rule_kind is None:
                raise ConfigError(f"[{name}] is missing a rule", lineno)
            if problem is None:
                raise ConfigError(f"[{name}] is missing a problem", lineno)
            try:
                rule = rule_from_dict({"kind": rule_kind, **params})
            except (KeyError, ConfigError):
                raise ConfigError(
                    f"rule {rule_kind!r} with params {sorted(params)} is invalid", lineno)
            runs.append(RunSpec(run_name, problem, rule))
        else:
            raise ConfigError(f"unknown section [{name}]", lineno)
    if not seen_experiment:
        raise ConfigError("missing [experiment] section")
    cfg.runs = runs
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _csv_cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def trace_csv_text(trace: Trace) -> str:
    lines = [Trace.CSV_HEADER]
    for row in trace.rows():
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_trace_csv(path, trace: Trace) -> None:
    Path(path).write_text(trace_csv_text(trace), encoding="utf-8")


def read_trace_csv(path) -> dict:
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = text[0].split(",")
    if header != Trace.CSV_HEADER.split(","):
        raise ValueError(f"unexpected CSV header in {path}")
    cols = {name: [] for name in header}
    for line in text[1:]:
        for name, cell in zip(header, line.split(",")):
            cols[name].append(float(cell))
    return {name: np.asarray(vals) for name, vals in cols.items()}


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

SUMMARY_HEADER = ("problem,rule,status,iterations,final_F,essential_metric,"
                  "essential_total," + ",".join(CSV_COUNTER_FIELDS) + ",reused_evals")


@dataclass
class CellResult:
    spec: RunSpec
    instance: ProblemInstance
    trace: Trace
    csv_name: str
    reference: Optional[ReferenceSolution] = None

    def summary_row(self) -> str:
        t = self.trace
        c = t.counters
        total = essential_units_rows(self.instance.kind,
                                     t.counter_rows[-1:])[0] if t.iters else 0.0
        cells = [self.instance.kind, t.rule_name, t.status, str(t.iters),
                 repr(float(t.F_final)), essential_metric_name(self.instance.kind),
                 repr(float(total))]
        cells += [str(getattr(c, f)) for f in CSV_COUNTER_FIELDS]
        cells += [str(c.reused_evals)]
        return ",".join(cells)


def run_experiment(config: ExperimentConfig, record_traces: bool = False) -> List[CellResult]:
    """Execute every cell, writing one CSV per cell plus summary and metadata.

    ``record_traces`` keeps full iterate histories on the returned traces
    (needed when certificates run right after).
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    cache = out / "references" if config.reference == "auto" else None

    instances: dict = {}
    references: dict = {}
    results: List[CellResult] = []
    used_names = set()
    for spec in config.resolved_runs():
        if spec.problem not in instances:
            instances[spec.problem] = make_problem(spec.problem, config.seed, config.scale)
        inst = instances[spec.problem]
        run_cfg = RunConfig(max_iter=config.max_iter, grad_tol=config.grad_tol,
                            alpha0=config.alpha0, record_trace=record_traces,
                            record_rows=True, seed=config.seed)
        trace = run_solver(inst, spec.rule, run_cfg)
        base = f"{spec.problem}__{trace.rule_name}"
        csv_name = base + ".csv"
        i = 1
        while csv_name in used_names:
            i += 1
            csv_name = f"{base}_{i}.csv"
        used_names.add(csv_name)
        write_trace_csv(out / csv_name, trace)
        results.append(CellResult(spec, inst, trace, csv_name))

    if config.reference == "auto":
        for kind, inst in instances.items():
            references[kind] = make_reference(inst, cache)
        for r in results:
            r.reference = references.get(r.instance.kind)

    summary_lines = [SUMMARY_HEADER] + [r.summary_row() for r in results]
    (out / "summary.csv").write_text("\n".join(summary_lines) + "\n", encoding="utf-8")

    meta = {
        "format": META_FORMAT,
        "name": config.name,
        "seed": config.seed,
        "scale": config.scale,
        "max_iter": config.max_iter,
        "grad_tol": config.grad_tol,
        "alpha0": config.alpha0,
        "plot": config.plot,
        "reference": config.reference,
        "cells": [
            {
                "run_name": r.spec.name,
                "csv": r.csv_name,
                "problem": instance_descriptor(r.instance),
                "rule": rule_to_dict(r.spec.rule),
            }
            for r in results
        ],
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")

    if config.plot:
        plot_run_dir(out)
    return results


# ---------------------------------------------------------------------------
# Essential-operation views
# ---------------------------------------------------------------------------

def row_essential_units(kind: str, rule_kind: str, cols: dict) -> np.ndarray:
    """Essential units per CSV row.

    The CSV keeps the six raw counters; the reuse discount is reconstructed
    from the run structure: under backtracking every gradient except the
    initial stepsize-search probes reuses the matching accepted evaluation
    (row 0 pins the probe count), and the other rules never evaluate the
    objective at all.
    """
    rows = np.stack([cols[f] for f in CSV_COUNTER_FIELDS], axis=1)
    if rule_kind == "armijo" and rows.shape[0]:
        probes = max(float(cols["grad_evals"][0]) - 1.0, 0.0)
        reused = np.maximum(cols["grad_evals"] - probes, 0.0)
    else:
        reused = np.zeros(rows.shape[0])
    full = np.concatenate([rows, reused[:, None]], axis=1)
    return essential_units_rows(kind, full)


def ops_to_accuracy(trace: Trace, kind: str, threshold: float) -> float:
    """Essential units spent when F first reaches ``threshold``; inf if never."""
    if trace.F_initial <= threshold:
        return 0.0
    if trace.F_steps is None:
        raise ValueError("trace has no rows")
    hits = np.nonzero(trace.F_steps <= threshold)[0]
    if hits.size == 0:
        return math.inf
    units = essential_units_rows(kind, trace.counter_rows[hits[0]:hits[0] + 1])
    return float(units[0])


# ---------------------------------------------------------------------------
# Plotting and checking stored runs
# ---------------------------------------------------------------------------

def plot_run_dir(run_dir) -> List[Path]:
    """Objective-gap vs essential-operations SVG per problem (read-only)."""
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "meta.json").read_text(encoding="utf-8")) \
        if (run_dir / "meta.json").exists() else None
    if meta is None:
        raise ValueError(f"{run_dir} has no meta.json")
    by_problem: dict = {}
    for cell in meta["cells"]:
        by_problem.setdefault(cell["problem"]["kind"], []).append(cell)
    outputs = []
    for kind, cells in by_problem.items():
        curves = []
        best = math.inf
        loaded = []
        for cell in cells:
            cols = read_trace_csv(run_dir / cell["csv"])
            loaded.append((cell, cols))
            if cols["F"].size:
                best = min(best, float(np.min(cols["F"])))
        ref_val = _reference_value(run_dir, cells[0]["problem"]) \
            if meta.get("reference") == "auto" else None
        anchor = ref_val if ref_val is not None else best
        for cell, cols in loaded:
            ops = row_essential_units(kind, cell["rule"]["kind"], cols)
            gaps = cols["F"] - anchor
            curves.append((_rule_label(cell["rule"]), ops, gaps))
        path = run_dir / f"{kind}_gap_vs_ops.svg"
        gap_plot_svg(f"{kind}: objective gap vs {essential_metric_name(kind)}",
                     curves, path, x_label=essential_metric_name(kind),
                     y_label="F - F_ref")
        outputs.append(path)
    return outputs


def _rule_label(rule_dict: dict) -> str:
    if rule_dict["kind"] == "armijo":
        return f"({rule_dict['s']:g}, {rule_dict['r']:g})"
    if rule_dict["kind"] in ("adgd2", "adproxgd"):
        return "adaptive"
    return rule_dict["kind"]


def _reference_value(run_dir: Path, problem_desc: dict) -> Optional[float]:
    from .reference import reference_path
    inst = instance_from_descriptor(problem_desc)
    path = reference_path(run_dir / "references", inst)
    if not path.exists():
        return None
    with np.load(path) as data:
        return float(data["F_star"])


def check_run_dir(run_dir, reports_out: Optional[Path] = None):
    """Re-run every stored cell deterministically and certify it.

    Each cell is regenerated from its descriptor, rerun with the recorded
    settings, byte-compared against the stored CSV, and passed through the
    applicable certificates.  Returns (lines, ok).
    """
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "meta.json").read_text(encoding="utf-8"))
    if meta.get("format") != META_FORMAT:
        raise ValueError("unrecognized run metadata format")
    cache = run_dir / "references" if meta.get("reference") == "auto" else None
    lines = []
    ok = True
    for cell in meta["cells"]:
        inst = instance_from_descriptor(cell["problem"])
        rule = rule_from_dict(cell["rule"])
        cfg = RunConfig(max_iter=meta["max_iter"], grad_tol=meta["grad_tol"],
                        alpha0=meta["alpha0"], record_trace=True,
                        record_rows=True, seed=meta["seed"])
        trace = run_solver(inst, rule, cfg)
        stored = (run_dir / cell["csv"]).read_text(encoding="utf-8")
        regenerated = trace_csv_text(trace)
        tag = f"{cell['problem']['kind']}/{trace.rule_name}"
        if stored != regenerated:
            ok = False
            lines.append(f"{tag:36s} trace_reproduction          FAIL  stored CSV differs")
            continue
        lines.append(f"{tag:36s} trace_reproduction          PASS")
        reference = None
        if cache is not None and inst.convex:
            reference = make_reference(inst, cache)
        for rep in run_certificates(inst, trace, reference):
            ok = ok and rep.passed
            lines.append(f"{tag:36s} {rep.to_line()}")
    if reports_out is not None:
        Path(reports_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return lines, ok
