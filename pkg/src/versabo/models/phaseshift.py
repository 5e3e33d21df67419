"""Phase-shift regression model: a sum of shifted logistic steps.

One-dimensional inputs; the mean is sum_k logistic(x; m_k, s_k, mu_k) + b_k
with Gaussian noise, capturing landscapes partitioned into near-uniform
regions by a few transitions.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..core import Dataset, Model, Observation, SamplePool, derive_seed, seed_normal
from .mh import MhConfig, mh_infer

__all__ = ["PhaseShiftModel", "logistic_step"]

_NOISE_STREAM = 11


def logistic_step(x, m, s, mu):
    """m / (1 + exp(-s (x - mu)))."""
    return m * expit(s * (np.asarray(x, dtype=float) - mu))


def _mean_of(x, z):
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x, dtype=float)
    s = np.exp(z["log_s"])
    for k in range(len(z["m"])):
        total = total + logistic_step(x, z["m"][k], s[k], z["mu"][k]) + z["b"][k]
    return total


class PhaseShiftModel(Model):
    """K-component logistic-steps model with MH inference."""

    def __init__(self, box, K: int = 2, mh: MhConfig | None = None, seed: int = 0):
        if box.dim != 1:
            raise ValueError("phase-shift model is one-dimensional")
        self.box = box
        self.K = int(K)
        self.mh = mh or MhConfig()
        self.seed = seed
        self._infer_count = 0

    def infer(self, data: Dataset) -> SamplePool:
        self._infer_count += 1
        chain_seed = derive_seed(self.seed, (903, self._infer_count))
        box, K = self.box, self.K
        lo, hi = float(box.lo[0]), float(box.hi[0])
        if len(data) > 0:
            x = data.inputs()[:, 0]
            y = data.objectives()
            mean_y = float(np.mean(y))
            sd_y = max(float(np.std(y)), 1e-2)
        else:
            x = y = None
            mean_y, sd_y = 0.0, 1.0

        def log_target(z):
            mu = z["mu"]
            if np.any(mu < lo) or np.any(mu > hi):
                return -np.inf
            lp = -0.5 * float(np.sum(z["m"] ** 2) + np.sum(z["b"] ** 2)) / 4.0
            lp += -0.5 * float(np.sum((z["log_s"] - 1.0) ** 2)) / 0.25
            lp += -0.5 * (z["log_sig2"] + 2.0) ** 2
            if x is not None:
                sig2 = np.exp(z["log_sig2"])
                r = y - _mean_of(x, z)
                lp += -0.5 * float(r @ r) / sig2 - 0.5 * len(y) * np.log(2.0 * np.pi * sig2)
            return lp

        init = {
            "m": np.full(K, 0.5 * sd_y),
            "log_s": np.full(K, 1.0),
            "mu": lo + (hi - lo) * (np.arange(1, K + 1) / (K + 1.0)),
            "b": np.full(K, mean_y / K),
            "log_sig2": -2.0,
        }
        scales = {"m": 0.2 * sd_y, "log_s": 0.15, "mu": 0.05 * (hi - lo),
                  "b": 0.2 * sd_y, "log_sig2": 0.2}
        cfg = MhConfig(steps=self.mh.steps, burn_fraction=self.mh.burn_fraction,
                       thinning=self.mh.thinning, init_scale=scales,
                       target_accept=self.mh.target_accept, pool_cap=self.mh.pool_cap,
                       adapt_batch=self.mh.adapt_batch)
        return mh_infer(log_target, init, cfg, chain_seed)

    def gen(self, x, z: dict, seed: int) -> Observation:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        mean = float(_mean_of(x[0], z))
        sig = np.sqrt(np.exp(z["log_sig2"]))
        y = mean + sig * seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        return Observation(float(y))
