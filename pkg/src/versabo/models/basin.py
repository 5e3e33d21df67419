"""Two-sided ReLU ("basin") regression model for V-shaped landscapes.

The surface is a·ReLU(x - mu) + b·ReLU(mu - x) + c with Gaussian noise:
mu marks the inflection point and a, b the slopes above and below it.
"""

from __future__ import annotations

import numpy as np

from ..core import Dataset, Model, Observation, SamplePool, derive_seed, seed_normal
from .mh import MhConfig, mh_infer

__all__ = ["BasinModel", "basin_R"]

_NOISE_STREAM = 11


def basin_R(x, a, b) -> float:
    """a' ReLU(x) + b' ReLU(-x) for one (already centered) input."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return float(a @ np.maximum(x, 0.0) + b @ np.maximum(-x, 0.0))


def _basin_mean_rows(X, mu, a, b, c):
    D = X - mu
    return np.maximum(D, 0.0) @ a + np.maximum(-D, 0.0) @ b + c


class BasinModel(Model):
    """Basin regression with MH inference over (mu, slopes, offset, noise)."""

    def __init__(self, box, mh: MhConfig | None = None, seed: int = 0):
        self.box = box
        # the basin posterior is stiff (piecewise mean, small noise); the
        # cheap O(n) likelihood affords a longer default chain
        self.mh = mh or MhConfig(steps=8000)
        self.seed = seed
        self._infer_count = 0

    def infer(self, data: Dataset) -> SamplePool:
        self._infer_count += 1
        chain_seed = derive_seed(self.seed, (902, self._infer_count))
        box = self.box
        d = box.dim
        if len(data) > 0:
            X = data.inputs()
            y = data.objectives()
            mean_y = float(np.mean(y))
            var_y = max(float(np.var(y)), 1e-4)
            mu0 = X[int(np.argmin(y))].copy()
            c0 = float(np.min(y))
        else:
            X = y = None
            mean_y, var_y = 0.0, 1.0
            mu0 = 0.5 * (box.lo + box.hi)
            c0 = 0.0

        def log_target(z):
            mu = z["mu"]
            if np.any(mu < box.lo) or np.any(mu > box.hi):
                return -np.inf
            lp = -0.5 * float(np.sum(z["log_a"] ** 2) + np.sum(z["log_b"] ** 2))
            lp += -0.5 * (z["c"] - mean_y) ** 2 / var_y
            lp += -0.5 * (z["log_sig2"] + 2.0) ** 2
            if X is not None:
                mean = _basin_mean_rows(X, mu, np.exp(z["log_a"]), np.exp(z["log_b"]), z["c"])
                sig2 = np.exp(z["log_sig2"])
                r = y - mean
                lp += -0.5 * float(r @ r) / sig2 - 0.5 * len(y) * np.log(2.0 * np.pi * sig2)
            return lp

        init = {
            "mu": mu0,
            "log_a": np.zeros(d),
            "log_b": np.zeros(d),
            "c": c0,
            "log_sig2": -2.0,
        }
        scales = {"mu": 0.05 * float(np.mean(box.span)), "log_a": 0.15,
                  "log_b": 0.15, "c": 0.2 * np.sqrt(var_y), "log_sig2": 0.2}
        cfg = MhConfig(steps=self.mh.steps, burn_fraction=self.mh.burn_fraction,
                       thinning=self.mh.thinning, init_scale=scales,
                       target_accept=self.mh.target_accept, pool_cap=self.mh.pool_cap,
                       adapt_batch=self.mh.adapt_batch)
        return mh_infer(log_target, init, cfg, chain_seed)

    def gen(self, x, z: dict, seed: int) -> Observation:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        mean = basin_R(x - z["mu"], np.exp(z["log_a"]), np.exp(z["log_b"])) + z["c"]
        sig = np.sqrt(np.exp(z["log_sig2"]))
        y = mean + sig * seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        return Observation(float(y))
