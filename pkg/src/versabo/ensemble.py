"""Product-of-experts ensembling of two models' posterior predictives.

Two predictive sample sets are merged into samples of the (normalized)
product of the two predictive densities: an index pair over the inputs is
moved by a Metropolis rule whose weights reward agreement between the
paired values, and the pair mean is emitted with shrinking Gaussian
noise.  The combined draws drop into any acquisition in place of raw
``gen`` draws.
"""

from __future__ import annotations

import numpy as np

from .core import Model, derive_seed, objective_of

__all__ = ["pair_mean", "pair_weight", "combine", "ensemble_gen", "BpoeModel", "BpoeHandle"]

_ENS_STREAM = 5001
_COMBINE_STREAM = 5002
COMBINE_RULES = ("standard", "as-printed")


def pair_mean(y1: float, y2: float) -> float:
    """Mean output of one index pair."""
    return 0.5 * (y1 + y2)


def pair_weight(y1: float, y2: float, i: int) -> float:
    """Agreement weight of a pair at emission index i.

    The product of two normal densities of the values around their mean
    with standard deviation i^(-1/2): equal values get the maximal weight
    at that index, and the weight decays as the values separate.
    """
    return float(np.exp(_log_pair_weight(y1, y2, i)))


def _log_pair_weight(y1: float, y2: float, i: int) -> float:
    sd = i ** -0.5
    dev = 0.5 * (y1 - y2)  # each value sits this far from the pair mean
    return -dev * dev / (sd * sd) - np.log(2.0 * np.pi * sd * sd)


def combine(y1_samples, y2_samples, seed: int, rule: str = "standard") -> np.ndarray:
    """Merge two equal-length predictive sample sets into product samples.

    The index pair performs a Metropolis walk over pairs; the i-th output
    is drawn from a normal centered on the current pair mean with
    standard deviation i^(-1/2)/2.  ``rule`` selects the acceptance test:
    "standard" accepts a proposal when u < w_proposal/w_current;
    "as-printed" flips the comparison (kept for comparison runs, it
    prefers disagreeing pairs and does not target the product density).
    If both weights vanish the proposal is accepted.
    """
    if rule not in COMBINE_RULES:
        raise ValueError(f"combine rule must be one of {COMBINE_RULES}")
    y1 = np.asarray(y1_samples, dtype=float)
    y2 = np.asarray(y2_samples, dtype=float)
    if len(y1) != len(y2):
        raise ValueError("sample sets must have equal length")
    M = len(y1)
    if M < 1:
        raise ValueError("sample sets must be non-empty")
    rng = np.random.default_rng(derive_seed(seed, (_COMBINE_STREAM,)))
    t1, t2 = rng.integers(0, M, size=2)
    out = np.empty(M)
    for i in range(1, M + 1):
        c1, c2 = rng.integers(0, M, size=2)
        u = rng.uniform()
        log_wc = _log_pair_weight(y1[c1], y2[c2], i)
        log_wt = _log_pair_weight(y1[t1], y2[t2], i)
        if np.isneginf(log_wc) and np.isneginf(log_wt):
            accept = True
        elif rule == "standard":
            accept = np.log(u) < log_wc - log_wt
        else:
            accept = np.log(u) > log_wc - log_wt
        if accept:
            t1, t2 = c1, c2
        sd = (i ** -0.5) / 2.0
        out[i - 1] = pair_mean(y1[t1], y2[t2]) + sd * rng.standard_normal()
    return out


def ensemble_gen(x, gen1, gen2, pool1, pool2, M: int, seed: int,
                 extract=objective_of, rule: str = "standard") -> np.ndarray:
    """Draw M combined predictive objective samples from two models.

    For each m a uniform index into each pool picks a latent sample and
    doubles as the ``gen`` seed; the two M-sample sets are then merged
    with ``combine``.  Deterministic under a fixed seed.
    """
    if len(pool1) == 0 or len(pool2) == 0:
        raise ValueError("latent sample pools must be non-empty")
    rng = np.random.default_rng(derive_seed(seed, (_ENS_STREAM,)))
    idx = rng.integers(1, M + 1, size=(M, 2))
    y1 = np.empty(M)
    y2 = np.empty(M)
    for m in range(M):
        s1, s2 = int(idx[m, 0]), int(idx[m, 1])
        y1[m] = extract(gen1(x, pool1[(s1 - 1) % len(pool1)], s1))
        y2[m] = extract(gen2(x, pool2[(s2 - 1) % len(pool2)], s2))
    if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
        raise ValueError("non-finite predictive draw in ensemble evaluation")
    return combine(y1, y2, seed, rule=rule)


class BpoeHandle:
    """Pair of posterior handles for the two ensembled models."""

    __slots__ = ("h1", "h2")

    def __init__(self, h1, h2):
        self.h1 = h1
        self.h2 = h2


class BpoeModel(Model):
    """Drop-in ensemble of two models over the objective channel.

    ``infer`` runs both constituents.  Acquisition evaluation replaces raw
    ``gen`` draws with ``ensemble_gen`` output: M latent samples per side
    (M ``post`` calls each) feed M+M ``gen`` calls whose values are
    combined.  Only the objective channel is ensembled.
    """

    def __init__(self, model1: Model, model2: Model, rule: str = "standard"):
        if rule not in COMBINE_RULES:
            raise ValueError(f"combine rule must be one of {COMBINE_RULES}")
        self.model1 = model1
        self.model2 = model2
        self.rule = rule

    def infer(self, data) -> BpoeHandle:
        return BpoeHandle(self.model1.infer(data), self.model2.infer(data))

    def draw_combined(self, x, handle: BpoeHandle, M: int, seed_base: int,
                      extract=objective_of):
        """M combined objective draws plus (post, gen) call counts."""
        pool1 = [self.model1.post(handle.h1, derive_seed(seed_base, (1, m)))
                 for m in range(1, M + 1)]
        pool2 = [self.model2.post(handle.h2, derive_seed(seed_base, (2, m)))
                 for m in range(1, M + 1)]
        vals = ensemble_gen(x, self.model1.gen, self.model2.gen, pool1, pool2,
                            M, seed_base, extract=extract, rule=self.rule)
        return vals, 2 * M, 2 * M
