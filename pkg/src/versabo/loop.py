"""Outer Bayesian-optimization loop.

Each iteration runs inference exactly once, minimizes the configured
acquisition over the search box using only ``post`` and ``gen``, queries
the system at the chosen input, and appends the observation.  The whole
run is a pure function of its configuration: traces are reproducible
bit for bit.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from .acquisition import AcqEvalRecord, AcquisitionKind, lambda_reduce, _draw, _draw_ts
from .core import Dataset, Model, Observation, derive_seed, objective_of
from .ensemble import BpoeModel
from .optimize import AcqMinState, FidelitySchedule, SearchBox, mf_eval, optimize_acq

__all__ = ["RunConfig", "IterationRecord", "RunTrace", "BoRunError", "run_bo", "best_so_far"]

logger = logging.getLogger("versabo")

_INIT_X = 101
_INIT_Q = 102
_QUERY = 103
_OPT = 104
_FALLBACK = 105


@dataclass(frozen=True)
class RunConfig:
    """Settings of one optimization run.

    ``schedule`` switches the acquisition to multi-fidelity mode; with
    ``schedule=None`` every evaluation uses the kind's fixed fidelity.
    ``maximize=None`` defers to the system's own convention.
    """

    N: int
    acq: AcquisitionKind
    seed: int = 0
    n_init: int = 3
    budget: int = 60
    schedule: FidelitySchedule | None = None
    maximize: bool | None = None
    box: SearchBox | None = None
    model_id: str | None = None
    system_id: str | None = None

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be >= 0")
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")


@dataclass(slots=True)
class IterationRecord:
    """One loop iteration: the query, its outcomes, and cumulative costs."""

    iteration: int
    x: np.ndarray
    observation: Observation
    observed_f: float
    clean_f: float | None
    best_f: float
    post_calls: int
    gen_calls: int
    inf_calls: int
    wall_ms: float
    fallback: bool = False


class RunTrace:
    """Per-iteration records of one run."""

    def __init__(self):
        self.records: list[IterationRecord] = []

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, rec: IterationRecord):
        self.records.append(rec)

    def best_so_far(self, n: int) -> float:
        return best_so_far(self, n)


def best_so_far(trace: RunTrace, n: int) -> float:
    """Best (minimum) objective among the first n queried points.

    Uses the clean objective channel where the system exposes one, so
    contaminated observations do not fake progress.
    """
    if not 1 <= n <= len(trace.records):
        raise IndexError(f"iteration {n} outside trace of length {len(trace.records)}")
    return min(
        r.clean_f if r.clean_f is not None else r.observed_f
        for r in trace.records[:n]
    )


class BoRunError(RuntimeError):
    """Inference failed mid-run; carries the partial trace and dataset."""

    def __init__(self, message, dataset: Dataset, trace: RunTrace):
        super().__init__(message)
        self.dataset = dataset
        self.trace = trace


def _make_draw(model: Model, handle, kind: AcquisitionKind, x, iteration_seed, extract):
    """Bind a per-evaluation draw source: (M, seed) -> (values, post, gen counts)."""
    if isinstance(model, BpoeModel):
        def draw_fn(M, seed):
            return model.draw_combined(x, handle, M, seed, extract)
        return draw_fn
    post_fn = lambda s: model.post(handle, s)
    if kind.name == "ts":
        shared = {}

        def draw_fn(M, seed):
            pc = 0
            if "z" not in shared:
                shared["z"] = post_fn(iteration_seed)
                pc = 1
            vals = _draw_ts(x, lambda _s: shared["z"], model.gen, M, seed, 0, extract)
            return vals, pc, M
        return draw_fn

    def draw_fn(M, seed):
        return _draw(x, post_fn, model.gen, M, seed, extract), M, M
    return draw_fn


def run_bo(config: RunConfig, system, model: Model, extract=None):
    """Run the optimization loop; returns the final dataset and its trace.

    ``system`` exposes ``evaluate(x, seed) -> Observation`` plus a ``box``;
    a ``clean_objective(x)`` method, when present, feeds the best-so-far
    bookkeeping.  Inference runs once per iteration, never inside
    acquisition optimization.  If acquisition optimization fails, the
    iteration falls back to a uniform random query and is flagged.

    ``extract`` optionally replaces the objective extraction f(y) for
    systems whose observations need more than the plain objective field;
    it must map an Observation to a finite float in minimization
    convention, and it overrides the maximize flag.
    """
    master = config.seed
    box = config.box if config.box is not None else system.box
    maximize = config.maximize
    if maximize is None:
        maximize = bool(getattr(system, "maximize", False))
    sign = -1.0 if maximize else 1.0
    if extract is None:
        extract = (lambda y: -y.objective) if maximize else objective_of
    else:
        sign = 1.0
        maximize = False
    clean_fn = getattr(system, "clean_objective", None)
    kind = config.acq

    data = Dataset()
    rng_init = np.random.default_rng(derive_seed(master, (_INIT_X,)))
    X0 = box.sample(rng_init, config.n_init)
    for i in range(config.n_init):
        y = system.evaluate(X0[i], derive_seed(master, (_INIT_Q, i)))
        data = data.append(X0[i], y)

    trace = RunTrace()
    post_calls = 0
    gen_calls = 0
    inf_calls = 0
    best = np.inf
    t_start = time.perf_counter()

    for n in range(1, config.N + 1):
        try:
            handle = model.infer(data)
        except Exception as err:
            raise BoRunError(f"inference failed at iteration {n}: {err}", data, trace) from err
        inf_calls += 1
        fmin_val = min(extract(pair[1]) for pair in data)
        iteration_seed = derive_seed(master, (n,))
        state = AcqMinState()

        if config.schedule is None:
            def acq_eval(x, j, _n=n, _h=handle, _it=iteration_seed, _fm=fmin_val):
                seed_base = derive_seed(master, (_n, j))
                draw_fn = _make_draw(model, _h, kind, x, _it, extract)
                vals, pc, gc = draw_fn(kind.fidelity, seed_base)
                raw = lambda_reduce(kind, vals, _fm)
                return AcqEvalRecord(kind.sign * raw, pc, gc, kind.fidelity)
        else:
            def acq_eval(x, j, _n=n, _h=handle, _it=iteration_seed, _fm=fmin_val):
                seed_base = derive_seed(master, (_n, j))
                draw_fn = _make_draw(model, _h, kind, x, _it, extract)
                return mf_eval(draw_fn, kind, config.schedule, state, seed_base, _fm)

        fallback = False
        try:
            x_n, totals = optimize_acq(acq_eval, box, config.budget,
                                       derive_seed(master, (_OPT, n)))
            post_calls += totals.post_calls
            gen_calls += totals.gen_calls
        except Exception as err:
            logger.warning("acquisition optimization failed at iteration %d (%s); "
                           "falling back to a uniform random query", n, err)
            rng_fb = np.random.default_rng(derive_seed(master, (_FALLBACK, n)))
            x_n = box.sample(rng_fb, 1)[0]
            fallback = True

        y_n = system.evaluate(x_n, derive_seed(master, (_QUERY, n)))
        data = data.append(x_n, y_n)
        observed_f = extract(y_n)
        clean_f = sign * float(clean_fn(x_n)) if clean_fn is not None else None
        best = min(best, clean_f if clean_f is not None else observed_f)
        wall_ms = (time.perf_counter() - t_start) * 1000.0
        trace.append(IterationRecord(
            iteration=n, x=x_n, observation=y_n, observed_f=observed_f,
            clean_f=clean_f, best_f=best, post_calls=post_calls,
            gen_calls=gen_calls, inf_calls=inf_calls, wall_ms=wall_ms,
            fallback=fallback,
        ))

    return data, trace
