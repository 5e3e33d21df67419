"""Monte Carlo acquisition functions computed through ``post`` and ``gen``.

Four acquisition strategies are provided: expected improvement (EI),
probability of improvement (PI), a confidence-bound rule (UCB, computed as
a lower confidence bound since the loop minimizes), and Thompson sampling
(TS).  Each draws M posterior-predictive samples and applies a final
reduction; M is the fidelity of the estimate.

Sign convention: EI and PI return improvement scores where larger is
better; the optimizer minimizes their negation.  UCB and TS return values
that are minimized directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Observation, derive_seed_array, objective_of

__all__ = [
    "EmpiricalQuantile",
    "Parametric",
    "AcquisitionKind",
    "AcqEvalRecord",
    "acq_ei",
    "acq_pi",
    "acq_ucb",
    "acq_ts",
    "lcb_empirical_quantile",
    "lcb_parametric",
    "lambda_reduce",
    "MINIMIZE_SIGN",
]


@dataclass(frozen=True)
class EmpiricalQuantile:
    """Order-statistic LCB: return the b-th smallest of M draws.

    Non-integral b interpolates between the two bracketing order
    statistics; b outside [1, M] is clamped to the nearest one.
    """

    b: float = 2.0


@dataclass(frozen=True)
class Parametric:
    """Gaussian-assumption LCB: sample mean minus beta times sample variance.

    ``use_std=True`` switches to mean minus beta times the standard
    deviation for users expecting the classical rule; the default keeps
    the variance form.
    """

    beta: float = 0.5
    use_std: bool = False


LcbEstimator = EmpiricalQuantile | Parametric

# larger-is-better scores are negated before minimization
MINIMIZE_SIGN = {"ei": -1.0, "pi": -1.0, "ucb": 1.0, "ts": 1.0}


@dataclass(frozen=True)
class AcquisitionKind:
    """Which acquisition to compute, at what fidelity.

    ``fidelity`` is the number of posterior-predictive draws per
    evaluation.  UCB carries its LCB estimator.
    """

    name: str
    fidelity: int
    estimator: LcbEstimator | None = None

    def __post_init__(self):
        if self.name not in MINIMIZE_SIGN:
            raise ValueError(f"unknown acquisition kind {self.name!r}")
        if self.fidelity < 1:
            raise ValueError("fidelity M must be >= 1")
        if self.name == "ucb":
            est = self.estimator if self.estimator is not None else EmpiricalQuantile()
            object.__setattr__(self, "estimator", est)
            if isinstance(est, Parametric) and self.fidelity < 2:
                raise ValueError("parametric LCB needs M >= 2 for a sample variance")

    @property
    def sign(self) -> float:
        return MINIMIZE_SIGN[self.name]


@dataclass(slots=True)
class AcqEvalRecord:
    """Result of one acquisition evaluation, with call accounting."""

    value: float
    post_calls: int
    gen_calls: int
    fidelity_used: int


def _draw(x, post, gen, M: int, seed_base: int, extract) -> np.ndarray:
    """M posterior-predictive objective draws: z_m = post(s_m), y_m = gen(x, z_m, s_m)."""
    seeds = derive_seed_array(seed_base, np.arange(1, M + 1, dtype=np.uint64))
    out = np.empty(M)
    for m in range(M):
        s = int(seeds[m])
        y = gen(x, post(s), s)
        out[m] = extract(y)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite predictive draw in acquisition evaluation")
    return out


def _draw_ts(x, post, gen, M: int, seed_base: int, iteration_seed: int, extract) -> np.ndarray:
    """M generative draws under one shared posterior sample (Thompson sampling)."""
    z = post(iteration_seed)
    seeds = derive_seed_array(seed_base, np.arange(1, M + 1, dtype=np.uint64))
    out = np.empty(M)
    for m in range(M):
        s = int(seeds[m])
        out[m] = extract(gen(x, z, s))
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite predictive draw in acquisition evaluation")
    return out


def acq_ei(x, post, gen, f_min: float, M: int, seed_base: int,
           extract: Callable[[Observation], float] = objective_of) -> AcqEvalRecord:
    """Expected-improvement score from M posterior-predictive draws.

    Returns the summed improvement of draws that fall at or below
    ``f_min``.  Larger is better; minimize the negation.
    """
    vals = _draw(x, post, gen, M, seed_base, extract)
    value = float(np.maximum(f_min - vals, 0.0).sum())
    return AcqEvalRecord(value, post_calls=M, gen_calls=M, fidelity_used=M)


def acq_pi(x, post, gen, f_min: float, M: int, seed_base: int,
           extract: Callable[[Observation], float] = objective_of) -> AcqEvalRecord:
    """Probability-of-improvement count from M posterior-predictive draws.

    Returns the number of draws at or below ``f_min``.  Larger is better;
    minimize the negation.
    """
    vals = _draw(x, post, gen, M, seed_base, extract)
    value = float(np.count_nonzero(vals <= f_min))
    return AcqEvalRecord(value, post_calls=M, gen_calls=M, fidelity_used=M)


def acq_ucb(x, post, gen, estimator: LcbEstimator, M: int, seed_base: int,
            extract: Callable[[Observation], float] = objective_of) -> AcqEvalRecord:
    """Lower confidence bound of M posterior-predictive draws; minimized directly."""
    vals = _draw(x, post, gen, M, seed_base, extract)
    if isinstance(estimator, EmpiricalQuantile):
        value = lcb_empirical_quantile(vals, estimator.b)
    else:
        value = lcb_parametric(vals, estimator.beta, use_std=estimator.use_std)
    return AcqEvalRecord(value, post_calls=M, gen_calls=M, fidelity_used=M)


def acq_ts(x, post, gen, M: int, seed_base: int, iteration_seed: int,
           extract: Callable[[Observation], float] = objective_of) -> AcqEvalRecord:
    """Thompson-sampling score: sum of M generative draws under one posterior sample.

    ``iteration_seed`` is held fixed for a whole optimization-loop
    iteration so every candidate sees the same latent sample.  Minimized
    directly.
    """
    vals = _draw_ts(x, post, gen, M, seed_base, iteration_seed, extract)
    return AcqEvalRecord(float(vals.sum()), post_calls=1, gen_calls=M, fidelity_used=M)


def lcb_empirical_quantile(values, b: float) -> float:
    """Order-statistic lower bound of a sample.

    With values sorted ascending and 1-indexed, returns the b-th order
    statistic for integral b, and the midpoint of the two bracketing order
    statistics otherwise.  b is clamped into [1, M].
    """
    vals = np.sort(np.asarray(values, dtype=float))
    M = len(vals)
    if M == 0:
        raise ValueError("empty sample")
    b = min(max(float(b), 1.0), float(M))
    lo = int(np.floor(b))
    if b == lo:
        return float(vals[lo - 1])
    return float(0.5 * (vals[lo - 1] + vals[lo]))


def lcb_parametric(values, beta: float, use_std: bool = False) -> float:
    """Sample mean minus beta times the unbiased sample variance.

    Requires at least two values.  ``use_std=True`` subtracts beta times
    the standard deviation instead.
    """
    vals = np.asarray(values, dtype=float)
    if len(vals) < 2:
        raise ValueError("parametric LCB needs at least 2 samples")
    mu = vals.mean()
    var = vals.var(ddof=1)
    spread = np.sqrt(var) if use_std else var
    return float(mu - beta * spread)


def lambda_reduce(kind: AcquisitionKind, objectives, f_min: float | None = None) -> float:
    """Final reduction of a pre-drawn objective sample for the given kind.

    This is the last line of each acquisition algorithm applied to
    externally supplied draws; the bootstrap resampler relies on it.
    """
    vals = np.asarray(objectives, dtype=float)
    if len(vals) == 0:
        raise ValueError("empty objective sample")
    if kind.name == "ei":
        return float(np.maximum(f_min - vals, 0.0).sum())
    if kind.name == "pi":
        return float(np.count_nonzero(vals <= f_min))
    if kind.name == "ts":
        return float(vals.sum())
    est = kind.estimator
    if isinstance(est, EmpiricalQuantile):
        return lcb_empirical_quantile(vals, _scaled_b(est.b, kind.fidelity, len(vals)))
    return lcb_parametric(vals, est.beta, use_std=est.use_std)


def _scaled_b(b: float, nominal_M: int, M: int) -> float:
    """Rescale an order-statistic index to a different sample size.

    Keeps the quantile fraction b/(M+1) constant so confidence-bound
    values stay comparable across fidelities.
    """
    if M == nominal_M:
        return b
    return b * (M + 1) / (nominal_M + 1)


def reduce_normalized(kind: AcquisitionKind, objectives, f_min: float | None = None) -> float:
    """Per-draw (mean) version of ``lambda_reduce``, comparable across fidelities.

    EI/PI/TS sums are divided by the number of draws; confidence bounds are
    already sample-size-free.
    """
    vals = np.asarray(objectives, dtype=float)
    raw = lambda_reduce(kind, vals, f_min)
    if kind.name in ("ei", "pi", "ts"):
        return raw / len(vals)
    return raw


def reduce_rows_normalized(kind: AcquisitionKind, V: np.ndarray, f_min: float | None = None) -> np.ndarray:
    """Row-wise ``reduce_normalized`` for a (B, M) matrix of resampled draws."""
    B, M = V.shape
    if kind.name == "ei":
        return np.maximum(f_min - V, 0.0).sum(axis=1) / M
    if kind.name == "pi":
        return (V <= f_min).sum(axis=1) / M
    if kind.name == "ts":
        return V.sum(axis=1) / M
    est = kind.estimator
    if isinstance(est, EmpiricalQuantile):
        b = min(max(_scaled_b(est.b, kind.fidelity, M), 1.0), float(M))
        S = np.sort(V, axis=1)
        lo = int(np.floor(b))
        if b == lo:
            return S[:, lo - 1].astype(float)
        return 0.5 * (S[:, lo - 1] + S[:, lo])
    mu = V.mean(axis=1)
    var = V.var(axis=1, ddof=1)
    spread = np.sqrt(var) if est.use_std else var
    return mu - est.beta * spread
