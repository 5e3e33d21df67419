"""Acquisition minimization: bootstrap-gated multi-fidelity evaluation and
a derivative-free optimizer (uniform candidates plus local refinement).

The multi-fidelity evaluator spends few predictive draws on points that
are clearly worse than the best acquisition value seen so far, and
escalates to higher fidelities only while a bootstrap lower confidence
bound keeps the point plausible as the minimizer.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .acquisition import (
    AcqEvalRecord,
    AcquisitionKind,
    reduce_normalized,
    reduce_rows_normalized,
    _draw,
    _draw_ts,
)
from .core import derive_seed, objective_of

__all__ = [
    "FidelitySchedule",
    "SearchBox",
    "AcqMinState",
    "lcb_bootstrap",
    "acq_mf",
    "mf_eval",
    "optimize_acq",
]

_RESAMPLE_STREAM = 7001


@dataclass(frozen=True)
class FidelitySchedule:
    """Strictly increasing fidelities plus bootstrap parameters.

    ``bootstrap_reps`` resamples are reduced per fidelity and
    ``lcb_quantile`` picks the lower tail of their distribution.
    """

    fidelities: tuple[int, ...] = (10, 100, 1000)
    bootstrap_reps: int = 50
    lcb_quantile: float = 0.1

    def __post_init__(self):
        fids = tuple(int(m) for m in self.fidelities)
        object.__setattr__(self, "fidelities", fids)
        if len(fids) < 1 or any(m < 1 for m in fids):
            raise ValueError("need at least one positive fidelity")
        if any(a >= b for a, b in zip(fids, fids[1:])):
            raise ValueError("fidelities must be strictly increasing")
        if self.bootstrap_reps < 1:
            raise ValueError("bootstrap_reps must be >= 1")
        if not 0.0 < self.lcb_quantile < 0.5:
            raise ValueError("lcb_quantile must lie in (0, 0.5)")


@dataclass(frozen=True)
class SearchBox:
    """Axis-aligned box of per-dimension [lo, hi] intervals."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if not np.all(lo < hi):
            raise ValueError("need lo < hi in every dimension")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "SearchBox":
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def span(self) -> np.ndarray:
        return self.hi - self.lo

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))


class AcqMinState:
    """Running minimum acquisition value within one optimizer run.

    Updates are linearizable so candidate evaluations may run
    concurrently; the value is non-increasing.
    """

    __slots__ = ("_lock", "a_min")

    def __init__(self, a_min: float = np.inf):
        self._lock = threading.Lock()
        self.a_min = float(a_min)

    def update(self, value: float) -> None:
        with self._lock:
            if value < self.a_min:
                self.a_min = value


def _bootstrap_lcb_of_values(values: np.ndarray, kind: AcquisitionKind, B: int, q: float,
                             f_min, resample_seed: int) -> float:
    """q-quantile of B resampled, sign-adjusted acquisition reductions."""
    rng = np.random.default_rng(resample_seed)
    M = len(values)
    idx = rng.integers(0, M, size=(B, M))
    a = kind.sign * reduce_rows_normalized(kind, values[idx], f_min)
    return float(np.quantile(a, q))


def lcb_bootstrap(x, post, gen, kind: AcquisitionKind, M_f: int, B: int, q: float,
                  f_min: float | None, seed_base: int,
                  extract=objective_of, iteration_seed: int | None = None) -> float:
    """Bootstrap lower confidence bound of one acquisition evaluation.

    Draws M_f predictive objectives once, resamples them with replacement
    B times, reduces each resample with the acquisition's final operation
    (in minimizer sign convention), and returns the empirical q-quantile.
    """
    if kind.name == "ts":
        vals = _draw_ts(x, post, gen, M_f, seed_base, iteration_seed, extract)
    else:
        vals = _draw(x, post, gen, M_f, seed_base, extract)
    return _bootstrap_lcb_of_values(vals, kind, B, q, f_min,
                                    derive_seed(seed_base, (_RESAMPLE_STREAM,)))


def mf_eval(draw_fn, kind: AcquisitionKind, schedule: FidelitySchedule,
            state: AcqMinState, seed_base: int, f_min: float | None = None) -> AcqEvalRecord:
    """Generic multi-fidelity evaluation over any draw source.

    ``draw_fn(M, seed) -> (values, post_calls, gen_calls)`` produces M
    predictive objective draws.  Ascends the fidelity schedule while the
    bootstrap LCB stays at or below the best value seen so far; stops at
    the first fidelity whose LCB exceeds it (or at the top), and reuses
    that fidelity's draws for the returned estimate.  The returned value
    is in minimizer convention and normalized per draw, so values are
    comparable across fidelities; the running minimum is updated with it.
    """
    B, q = schedule.bootstrap_reps, schedule.lcb_quantile
    post_calls = 0
    gen_calls = 0
    F = len(schedule.fidelities)
    for f, M_f in enumerate(schedule.fidelities, start=1):
        seed_f = derive_seed(seed_base, (f,))
        vals, pc, gc = draw_fn(M_f, seed_f)
        post_calls += pc
        gen_calls += gc
        lcb = _bootstrap_lcb_of_values(vals, kind, B, q, f_min,
                                       derive_seed(seed_f, (_RESAMPLE_STREAM,)))
        if lcb > state.a_min or f == F:
            value = kind.sign * reduce_normalized(kind, vals, f_min)
            state.update(value)
            return AcqEvalRecord(value, post_calls=post_calls, gen_calls=gen_calls,
                                 fidelity_used=M_f)
    raise AssertionError("unreachable: loop returns at the top fidelity")


def acq_mf(x, post, gen, kind: AcquisitionKind, schedule: FidelitySchedule,
           state: AcqMinState, seed_base: int, f_min: float | None = None,
           extract=objective_of, iteration_seed: int | None = None) -> AcqEvalRecord:
    """Multi-fidelity acquisition evaluation through ``post`` and ``gen``.

    Thompson sampling fetches its shared posterior sample once per
    evaluation and reuses it across fidelities.
    """
    if kind.name == "ts":
        shared = {}

        def draw_fn(M, seed):
            pc = 0
            if "z" not in shared:
                shared["z"] = post(iteration_seed)
                pc = 1
            vals = _draw_ts(x, lambda _s: shared["z"], gen, M, seed, 0, extract)
            return vals, pc, M
    else:

        def draw_fn(M, seed):
            return _draw(x, post, gen, M, seed, extract), M, M

    return mf_eval(draw_fn, kind, schedule, state, seed_base, f_min)


def optimize_acq(acq_fn, box: SearchBox, budget: int, seed: int,
                 refine_rounds: int = 20, refine_scale: float = 0.05,
                 halve_every: int = 5):
    """Minimize an acquisition over a box with random search plus refinement.

    Evaluates ``acq_fn(x, index)`` on ``budget`` uniform candidates, then
    polishes the incumbent with Gaussian perturbations (per-dimension
    scale ``refine_scale`` times the box span, halved every
    ``halve_every`` rounds), accepting strict improvements only.  Ties
    break toward the earliest evaluation.  Returns the best input and a
    record aggregating call counts over every evaluation.

    Parameters
    ----------
    acq_fn : callable
        ``acq_fn(x, index) -> AcqEvalRecord`` with ``value`` in minimizer
        convention.  ``index`` is the pre-assigned evaluation index used
        for seed derivation.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    candidates = box.sample(rng, budget)
    best_x = None
    best_value = np.inf
    best_fidelity = 0
    post_total = 0
    gen_total = 0
    for j in range(budget):
        rec = acq_fn(candidates[j], j)
        post_total += rec.post_calls
        gen_total += rec.gen_calls
        if rec.value < best_value:
            best_value = rec.value
            best_x = candidates[j]
            best_fidelity = rec.fidelity_used
    scale = refine_scale * box.span
    for r in range(refine_rounds):
        if r > 0 and r % halve_every == 0:
            scale = scale / 2.0
        x_prop = box.clip(best_x + scale * rng.standard_normal(box.dim))
        rec = acq_fn(x_prop, budget + r)
        post_total += rec.post_calls
        gen_total += rec.gen_calls
        if rec.value < best_value:
            best_value = rec.value
            best_x = x_prop
            best_fidelity = rec.fidelity_used
    totals = AcqEvalRecord(best_value, post_calls=post_total, gen_calls=gen_total,
                           fidelity_used=best_fidelity)
    return best_x, totals
