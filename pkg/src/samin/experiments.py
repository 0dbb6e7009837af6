"""Parameter sweeps and scheme comparison, with CSV and JSON output.

Every CSV starts with ``#`` comment lines carrying the full scenario text, so
a run can be repeated from its own output. Rows are sorted by (sweep value,
scheme) before writing; worker scheduling never shows up in the file.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from samin import __version__, model
from samin.baselines import solve_all
from samin.config import SCHEMES, ScenarioConfig, build_from_config, effective_parameters, serialize
from samin.errors import ConfigError

THREADS_ENV = "SAMIN_THREADS"

COLUMNS = (
    "sweep_variable", "sweep_value", "scheme", "E_total", "E_mean", "T_mean", "T_max",
    "a_mean", "s_fraction_mean", "iterations", "converged", "n_mass", "n_feasible",
    "n_infeasible", "objective_trace",
)
INT_COLUMNS = {"iterations", "n_mass", "n_feasible", "n_infeasible"}
TEXT_COLUMNS = {"sweep_variable", "scheme", "converged", "objective_trace"}
META_PREFIX = "# "
CONFIG_PREFIX = "#| "


def fmt(value) -> str:
    """Numbers at 17 significant digits, which round-trip any double."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(serialize(cfg).encode("utf-8")).hexdigest()[:16]


@dataclass
class SweepResult:
    rows: list
    metadata: dict = field(default_factory=dict)

    @property
    def variable(self) -> str:
        return self.metadata.get("sweep_variable", self.rows[0]["sweep_variable"] if self.rows else "")

    @property
    def schemes(self) -> list:
        return sorted({r["scheme"] for r in self.rows})

    def series(self, scheme: str, column: str) -> tuple[np.ndarray, np.ndarray]:
        rows = [r for r in self.rows if r["scheme"] == scheme]
        return (np.array([r["sweep_value"] for r in rows], float),
                np.array([r[column] for r in rows], float))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in ("tool", "version", "config_hash", "seed", "sweep_variable"):
            if key in self.metadata:
                buf.write(f"{META_PREFIX}{key}: {self.metadata[key]}\n")
        for line in self.metadata.get("config_text", "").splitlines():
            buf.write(f"{CONFIG_PREFIX}{line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self.rows:
            writer.writerow([row[c] if c in TEXT_COLUMNS else fmt(row[c]) for c in COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        meta, config_lines, body = {}, [], []
        for line in text.splitlines():
            if line.startswith(CONFIG_PREFIX):
                config_lines.append(line[len(CONFIG_PREFIX):])
            elif line.startswith(META_PREFIX):
                key, _, value = line[len(META_PREFIX):].partition(": ")
                meta[key] = value
            else:
                body.append(line)
        if config_lines:
            meta["config_text"] = "\n".join(config_lines) + "\n"
        reader = csv.DictReader(body)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError("not a sweep CSV: unexpected header")
        rows = []
        for raw in reader:
            row = {}
            for c in COLUMNS:
                if c in TEXT_COLUMNS:
                    row[c] = raw[c]
                elif c in INT_COLUMNS:
                    row[c] = int(raw[c])
                else:
                    row[c] = float(raw[c])
            rows.append(row)
        return cls(rows, meta)

    def write(self, out_dir: str) -> tuple[str, str]:
        """Write ``<name>.csv`` and its JSON sidecar; returns both paths."""
        os.makedirs(out_dir, exist_ok=True)
        stem = os.path.join(out_dir, f"sweep_{self.variable}_{self.metadata.get('config_hash', 'run')}")
        with open(stem + ".csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())
        with open(stem + ".json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        return stem + ".csv", stem + ".json"


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def summarize(scenario, report, sweep_variable: str = "", sweep_value: float = float("nan")) -> dict:
    """One result row for one scheme on one scenario."""
    metrics = model.evaluate_plan(scenario, report.plan)
    bad = {(m, n) for m, n, _ in report.infeasible_entries}
    n_mass = int(np.prod(scenario.shape))
    with np.errstate(invalid="ignore", divide="ignore"):
        s_fraction = report.plan.s / scenario.S
    return {
        "sweep_variable": sweep_variable,
        "sweep_value": float(sweep_value),
        "scheme": report.scheme,
        "E_total": float(metrics.E_total),
        "E_mean": float(metrics.E_total) / n_mass,
        "T_mean": float(np.mean(metrics.T_total)),
        "T_max": float(np.max(metrics.T_total)),
        "a_mean": float(np.mean(report.plan.a)),
        "s_fraction_mean": float(np.mean(s_fraction)),
        "iterations": int(report.iterations_used),
        "converged": "true" if report.converged else "false",
        "n_mass": n_mass,
        "n_feasible": n_mass - len(bad),
        "n_infeasible": len(bad),
        "objective_trace": ";".join(fmt(v) for v in report.objective_trace),
    }


def scenario_at(cfg: ScenarioConfig, variable: str, value: float, base=None):
    """Scenario and solver settings for one sweep point."""
    solver = cfg.solver
    if variable == "N":
        return build_from_config(cfg, n_per_uav=int(round(value))), solver
    scenario = base if base is not None else build_from_config(cfg)
    if variable == "a":
        return scenario, dataclasses.replace(solver, fixed_a=float(value))
    return scenario.with_tasks(**{variable: value}), solver


def _run_point(cfg: ScenarioConfig, variable: str, value: float, schemes: tuple) -> list:
    scenario, solver = scenario_at(cfg, variable, value)
    reports = solve_all(scenario, solver, schemes=schemes, warm_start=cfg.warm_start)
    return [summarize(scenario, reports[name], variable, value) for name in schemes]


def worker_count(n_tasks: int, environ=None) -> int:
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}", key=THREADS_ENV) from None
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV} must be at least 1", key=THREADS_ENV)
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def run_sweep(cfg: ScenarioConfig, schemes: Optional[tuple] = None,
              workers: Optional[int] = None) -> SweepResult:
    """Solve every sweep point with every scheme; infeasible points stay in, flagged."""
    if cfg.sweep is None:
        raise ConfigError("config has no [sweep] section", key="sweep")
    schemes = tuple(schemes or cfg.sweep.schemes)
    unknown = set(schemes) - set(SCHEMES)
    if unknown:
        raise ConfigError(f"unknown schemes {sorted(unknown)}", key="schemes")
    variable, values = cfg.sweep.variable, cfg.sweep.values
    workers = worker_count(len(values)) if workers is None else max(1, min(workers, len(values)))
    if workers == 1:
        chunks = [_run_point(cfg, variable, v, schemes) for v in values]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point, [cfg] * len(values), [variable] * len(values),
                                   values, [schemes] * len(values)))
    rows = sorted((r for chunk in chunks for r in chunk),
                  key=lambda r: (r["sweep_value"], r["scheme"]))
    return SweepResult(rows, run_metadata(cfg, sweep_variable=variable, schemes=sorted(schemes)))


def run_metadata(cfg: ScenarioConfig, **extra) -> dict:
    meta = {
        "tool": "samin",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "config_text": serialize(cfg),
        "effective_parameters": effective_parameters(cfg),
        "columns": list(COLUMNS),
    }
    meta.update(extra)
    return meta


# --- compare --------------------------------------------------------------------

EXIT_OK = 0
EXIT_NOT_DOMINANT = 1
EXIT_INFEASIBLE = 3

COMPARE_COLUMNS = ("scheme", "E_total", "T_mean", "T_max", "iterations", "n_infeasible", "status")


@dataclass
class Comparison:
    rows: list
    exit_code: int
    metadata: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"{META_PREFIX}config_hash: {self.metadata['config_hash']}\n")
        buf.write(f"{META_PREFIX}seed: {self.metadata['seed']}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COMPARE_COLUMNS)
        for row in self.rows:
            writer.writerow([row[c] if c in ("scheme", "status") else fmt(row[c])
                             for c in COMPARE_COLUMNS])
        return buf.getvalue()

    def to_table(self) -> str:
        header = f"{'scheme':<8}{'E_total [J]':>26}{'T_mean [s]':>26}{'T_max [s]':>26}" \
                 f"{'iters':>7}{'infeasible':>12}  status"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(f"{r['scheme']:<8}{fmt(r['E_total']):>26}{fmt(r['T_mean']):>26}"
                         f"{fmt(r['T_max']):>26}{r['iterations']:>7}{r['n_infeasible']:>12}  {r['status']}")
        return "\n".join(lines) + "\n"


def compare(cfg: ScenarioConfig) -> Comparison:
    """All four schemes on one scenario; exit code 0 iff STP's energy is lowest."""
    scenario = build_from_config(cfg)
    reports = solve_all(scenario, cfg.solver, schemes=SCHEMES, warm_start=cfg.warm_start)
    rows = []
    for name in SCHEMES:
        summary = summarize(scenario, reports[name])
        rows.append({
            "scheme": name, "E_total": summary["E_total"], "T_mean": summary["T_mean"],
            "T_max": summary["T_max"], "iterations": summary["iterations"],
            "n_infeasible": summary["n_infeasible"],
            "status": "infeasible" if summary["n_infeasible"] else "ok",
        })
    E = {r["scheme"]: r["E_total"] for r in rows}
    scale = max(abs(v) for v in E.values() if np.isfinite(v)) if any(np.isfinite(list(E.values()))) else 1.0
    dominant = all(E["stp"] <= E[b] + 1e-9 * scale for b in SCHEMES if b != "stp")
    if not dominant:
        code = EXIT_NOT_DOMINANT
    elif any(r["n_infeasible"] for r in rows):
        code = EXIT_INFEASIBLE
    else:
        code = EXIT_OK
    return Comparison(rows, code, run_metadata(cfg))
