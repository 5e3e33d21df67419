"""Benchmark harness: runs grids of (system, model, acquisition) cells over
seeded trials and emits deterministic long-format and summary CSVs.

Configuration is a strict-schema JSON document; unknown keys are errors.
Trials may run concurrently, but rows are sorted by (cell_id, trial,
iter) before the final write, so concurrency never changes output bytes.
Wall-time measurements are nondeterministic and therefore written as 0
unless timing recording is switched on.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionKind, EmpiricalQuantile, Parametric
from .core import derive_seed
from .loop import RunConfig, run_bo
from .models import MhConfig, make_model
from .optimize import FidelitySchedule
from .systems import SYSTEM_IDS, make_system

__all__ = [
    "ConfigError",
    "CellSpec",
    "BenchmarkConfig",
    "parse_config",
    "run_benchmark",
    "default_contaminated_config",
    "default_mf_config",
    "default_state_config",
    "default_basin_config",
]

TRACE_HEADER_FIXED = ["cell_id", "system", "model", "acq", "fidelity_mode", "trial", "iter",
                      "best_f", "observed_f"]
TRACE_HEADER_TAIL = ["post_calls", "gen_calls", "inf_calls", "wall_ms"]

_ACQ_NAMES = ("ei", "pi", "ucb", "ts")
_LOOP_SYSTEMS = tuple(s for s in SYSTEM_IDS if s != "multitask")

_CELL_REQUIRED = {"id", "system", "model", "acq", "N"}
_CELL_OPTIONAL = {"M", "fidelity_mode", "fidelities", "bootstrap_reps", "lcb_quantile",
                  "budget", "n_init", "mh_steps", "mh_thinning", "ucb_b", "ucb_beta",
                  "ucb_std"}
_TOP_REQUIRED = {"cells"}
_TOP_OPTIONAL = {"trials", "seed", "combine_rule", "record_timing"}


class ConfigError(ValueError):
    """Configuration document violates the schema."""


@dataclass(frozen=True)
class CellSpec:
    """One benchmark cell: a system, a model, and an acquisition setup."""

    cell_id: str
    system: str
    model: str
    acq: str
    N: int
    M: int = 50
    fidelity_mode: str = "fixed"
    fidelities: tuple[int, ...] = (10, 1000)
    bootstrap_reps: int = 50
    lcb_quantile: float = 0.1
    budget: int = 60
    n_init: int = 3
    mh_steps: int = 2000
    mh_thinning: int = 5
    ucb_b: float | None = None
    ucb_beta: float | None = None
    ucb_std: bool = False

    def acquisition_kind(self) -> AcquisitionKind:
        M = self.fidelities[-1] if self.fidelity_mode == "mf" else self.M
        estimator = None
        if self.acq == "ucb":
            if self.ucb_beta is not None:
                estimator = Parametric(self.ucb_beta, use_std=self.ucb_std)
            else:
                b = self.ucb_b if self.ucb_b is not None else max(1.0, 0.1 * (M + 1))
                estimator = EmpiricalQuantile(b)
        return AcquisitionKind(self.acq, M, estimator)

    def schedule(self) -> FidelitySchedule | None:
        if self.fidelity_mode != "mf":
            return None
        return FidelitySchedule(self.fidelities, self.bootstrap_reps, self.lcb_quantile)


@dataclass(frozen=True)
class BenchmarkConfig:
    cells: tuple[CellSpec, ...]
    trials: int = 10
    seed: int = 0
    combine_rule: str = "standard"
    record_timing: bool = False


def parse_config(doc: dict) -> BenchmarkConfig:
    """Validate a configuration document; unknown keys are errors."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - _TOP_REQUIRED - _TOP_OPTIONAL
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    missing = _TOP_REQUIRED - set(doc)
    if missing:
        raise ConfigError(f"missing configuration keys: {sorted(missing)}")
    raw_cells = doc["cells"]
    if not isinstance(raw_cells, list) or not raw_cells:
        raise ConfigError("cells must be a non-empty list")
    cells = []
    seen = set()
    for i, raw in enumerate(raw_cells):
        if not isinstance(raw, dict):
            raise ConfigError(f"cell {i} must be an object")
        unknown = set(raw) - _CELL_REQUIRED - _CELL_OPTIONAL
        if unknown:
            raise ConfigError(f"cell {i}: unknown keys {sorted(unknown)}")
        missing = _CELL_REQUIRED - set(raw)
        if missing:
            raise ConfigError(f"cell {i}: missing keys {sorted(missing)}")
        if raw["system"] not in _LOOP_SYSTEMS:
            raise ConfigError(f"cell {i}: unknown system {raw['system']!r}"
                              f" (choose from {_LOOP_SYSTEMS})")
        if raw["acq"] not in _ACQ_NAMES:
            raise ConfigError(f"cell {i}: unknown acquisition {raw['acq']!r}")
        mode = raw.get("fidelity_mode", "fixed")
        if mode not in ("fixed", "mf"):
            raise ConfigError(f"cell {i}: fidelity_mode must be 'fixed' or 'mf'")
        if raw["id"] in seen:
            raise ConfigError(f"duplicate cell id {raw['id']!r}")
        seen.add(raw["id"])
        cells.append(CellSpec(
            cell_id=str(raw["id"]), system=str(raw["system"]), model=str(raw["model"]),
            acq=str(raw["acq"]), N=int(raw["N"]), M=int(raw.get("M", 50)),
            fidelity_mode=mode,
            fidelities=tuple(int(m) for m in raw.get("fidelities", (10, 1000))),
            bootstrap_reps=int(raw.get("bootstrap_reps", 50)),
            lcb_quantile=float(raw.get("lcb_quantile", 0.1)),
            budget=int(raw.get("budget", 60)), n_init=int(raw.get("n_init", 3)),
            mh_steps=int(raw.get("mh_steps", 2000)),
            mh_thinning=int(raw.get("mh_thinning", 5)),
            ucb_b=raw.get("ucb_b"), ucb_beta=raw.get("ucb_beta"),
            ucb_std=bool(raw.get("ucb_std", False)),
        ))
    trials = int(doc.get("trials", 10))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    rule = doc.get("combine_rule", "standard")
    if rule not in ("standard", "as-printed"):
        raise ConfigError("combine_rule must be 'standard' or 'as-printed'")
    return BenchmarkConfig(cells=tuple(cells), trials=trials,
                           seed=int(doc.get("seed", 0)), combine_rule=rule,
                           record_timing=bool(doc.get("record_timing", False)))


def _fmt(v) -> str:
    return repr(float(v))


def _run_cell_trial(config: BenchmarkConfig, cell_index: int, trial: int):
    """One (cell, trial) run; returns its trace rows (without x padding)."""
    cell = config.cells[cell_index]
    system = make_system(cell.system)
    mh = MhConfig(steps=cell.mh_steps, thinning=cell.mh_thinning)
    model = make_model(cell.model, system.box, mh=mh,
                       seed=derive_seed(config.seed, (cell_index, trial, 11)),
                       combine_rule=config.combine_rule)
    run_cfg = RunConfig(
        N=cell.N, acq=cell.acquisition_kind(), seed=derive_seed(config.seed, (cell_index, trial)),
        n_init=cell.n_init, budget=cell.budget, schedule=cell.schedule(),
        model_id=cell.model, system_id=cell.system,
    )
    _, trace = run_bo(run_cfg, system, model)
    rows = []
    for rec in trace:
        rows.append({
            "cell_id": cell.cell_id, "system": cell.system, "model": cell.model,
            "acq": cell.acq, "fidelity_mode": cell.fidelity_mode, "trial": trial,
            "iter": rec.iteration, "best_f": rec.best_f, "observed_f": rec.observed_f,
            "x": rec.x, "post_calls": rec.post_calls, "gen_calls": rec.gen_calls,
            "inf_calls": rec.inf_calls,
            "wall_ms": rec.wall_ms if config.record_timing else 0.0,
        })
    return rows


def run_benchmark(config: BenchmarkConfig, out_dir, serial: bool = False,
                  threads: int | None = None) -> dict:
    """Run every cell x trial and write trace.csv plus summary.csv.

    Completed trials are appended to a partial file as they finish; the
    final files are sorted and byte-stable for a fixed configuration.
    Returns the output paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(ci, t) for ci in range(len(config.cells)) for t in range(config.trials)]
    partial_path = out / "trace.partial.csv"
    results = {}
    if serial:
        with open(partial_path, "w") as partial:
            for ci, t in jobs:
                results[(ci, t)] = _run_cell_trial(config, ci, t)
                partial.write(f"done,{config.cells[ci].cell_id},{t}\n")
                partial.flush()
    else:
        if threads is None:
            threads = int(os.environ.get("VERSABO_THREADS", os.cpu_count() or 1))
        threads = max(1, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool, open(partial_path, "w") as partial:
            futures = {(ci, t): pool.submit(_run_cell_trial, config, ci, t) for ci, t in jobs}
            for (ci, t), fut in futures.items():
                results[(ci, t)] = fut.result()
                partial.write(f"done,{config.cells[ci].cell_id},{t}\n")
                partial.flush()

    all_rows = [row for key in sorted(results) for row in results[key]]
    all_rows.sort(key=lambda r: (r["cell_id"], r["trial"], r["iter"]))
    max_d = max(len(r["x"]) for r in all_rows)

    trace_path = out / "trace.csv"
    header = TRACE_HEADER_FIXED + [f"x{j}" for j in range(max_d)] + TRACE_HEADER_TAIL
    with open(trace_path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in all_rows:
            xs = [_fmt(v) for v in r["x"]] + [""] * (max_d - len(r["x"]))
            fields = [r["cell_id"], r["system"], r["model"], r["acq"], r["fidelity_mode"],
                      str(r["trial"]), str(r["iter"]), _fmt(r["best_f"]),
                      _fmt(r["observed_f"])] + xs + [
                      str(r["post_calls"]), str(r["gen_calls"]), str(r["inf_calls"]),
                      _fmt(r["wall_ms"])]
            fh.write(",".join(fields) + "\n")

    summary_path = out / "summary.csv"
    with open(summary_path, "w") as fh:
        fh.write("cell_id,iter,mean_best_f,se_best_f,n_trials\n")
        for cell in sorted(c.cell_id for c in config.cells):
            by_iter = {}
            for r in all_rows:
                if r["cell_id"] == cell:
                    by_iter.setdefault(r["iter"], []).append(r["best_f"])
            for it in sorted(by_iter):
                vals = np.asarray(by_iter[it])
                se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
                fh.write(f"{cell},{it},{_fmt(vals.mean())},{_fmt(se)},{len(vals)}\n")

    partial_path.unlink(missing_ok=True)
    return {"trace": trace_path, "summary": summary_path}


def default_contaminated_config(trials: int = 10, seed: int = 0) -> dict:
    """Contamination study grid: denoising GP vs plain GP at two levels."""
    cells = []
    for p_id, tag in (("contam-low-d2", "p01"), ("contam-high-d2", "p33")):
        for model in ("denoising_gp", "gp"):
            cells.append({
                "id": f"{tag}-{model}", "system": p_id, "model": model,
                "acq": "ei", "N": 50, "M": 100, "budget": 100, "mh_steps": 2000,
            })
    return {"cells": cells, "trials": trials, "seed": seed}


def default_mf_config(trials: int = 10, seed: int = 0) -> dict:
    """Acquisition-fidelity study grid: two-fidelity vs fixed low/high.

    Uses the confidence-bound acquisition: its scores have no
    zero-improvement plateau, so escalation tracks proximity to the
    minimum instead of tie-breaking noise.
    """
    base = {"system": "clean-d2", "model": "gp", "acq": "ucb", "N": 40,
            "budget": 40, "mh_steps": 1500}
    cells = [
        {"id": "mf-10-1000", "fidelity_mode": "mf", "fidelities": [10, 1000], **base},
        {"id": "fixed-10", "M": 10, **base},
        {"id": "fixed-1000", "M": 1000, **base},
    ]
    return {"cells": cells, "trials": trials, "seed": seed}


def default_state_config(trials: int = 10, seed: int = 0) -> dict:
    """State-observation study grid: switching model vs plain GP."""
    base = {"system": "state", "acq": "ei", "N": 50, "M": 100, "budget": 100,
            "mh_steps": 2000, "n_init": 6}
    return {"cells": [{"id": "state-switching", "model": "switching", **base},
                      {"id": "state-gp", "model": "gp", **base}],
            "trials": trials, "seed": seed}


def default_basin_config(trials: int = 10, seed: int = 0) -> dict:
    """Objective-structure study grid: basin model vs plain GP."""
    base = {"system": "basin", "acq": "ei", "N": 40, "M": 100, "budget": 100}
    return {"cells": [{"id": "basin-basin", "model": "basin", "mh_steps": 8000, **base},
                      {"id": "basin-gp", "model": "gp", "mh_steps": 2000, **base}],
            "trials": trials, "seed": seed}
