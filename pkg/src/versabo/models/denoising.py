"""Denoising GP: a robust mixture of a GP system model and a uniform
contamination component.

Each observation is explained either by the GP regression component or by
a uniform outlier distribution over the observed data range, with an
inferred mixture weight.  Per-point contamination indicators are latent;
given them the GP function is marginalized analytically, so inference
alternates random-walk Metropolis on the hyperparameters (shared engine)
with exact Gibbs updates of the indicators and of the weight.
Contaminated points are thereby inferred and ignored by the system
component.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..core import Dataset, Model, Observation, SamplePool, derive_seed, seed_normal, seed_uniform
from .gp import (
    data_scaled_defaults,
    gp_cache,
    gp_cached_moments,
    gp_hyper_logprior,
    gp_hyper_scales,
    gp_log_marginal,
)
from .mh import MhConfig, ParamSpace, mh_infer

__all__ = ["DenoisingGpModel"]

_PICK_STREAM = 21
_NOISE_STREAM = 11
_UNIF_STREAM = 31

# Beta prior on the contamination weight, favoring low contamination
_WC_A, _WC_B = 1.0, 4.0


class DenoisingGpModel(Model):
    """GP regression with an inferred uniform-contamination mixture.

    The latent sample carries the GP hyperparameters, the contamination
    weight, and the clean/contaminated assignment of every training
    point; ``gen`` mixes the GP predictive conditioned on the clean
    subset with a uniform draw over the contamination interval (fixed to
    the observed data range).
    """

    def __init__(self, box=None, mh: MhConfig | None = None, seed: int = 0,
                 sweeps: int = 80, theta_steps: int = 8):
        self.box = box
        self.mh = mh or MhConfig()
        self.seed = seed
        self.sweeps = sweeps
        self.theta_steps = theta_steps
        self._infer_count = 0

    # ------------------------------------------------------------------
    def infer(self, data: Dataset) -> SamplePool:
        self._infer_count += 1
        chain_seed = derive_seed(self.seed, (905, self._infer_count))
        centers = data_scaled_defaults(data, self.box)
        n = len(data)
        if n == 0:
            return self._prior_pool(centers, chain_seed)
        X = data.inputs()
        y = data.objectives()
        pad = 1e-6 * (np.ptp(y) + 1.0)
        lo_min = float(y.min() - pad)
        hi = float(y.max() + pad)
        diffsq = np.moveaxis((X[:, None, :] - X[None, :, :]) ** 2, 2, 0)

        clean = _robust_clean_guess(X, y)
        wc = (_WC_A + (~clean).sum()) / (_WC_A + _WC_B + n)
        lo_c = float(y[~clean].min() - pad) if (~clean).any() else lo_min

        def theta_target(z, mask):
            lp = gp_hyper_logprior(z, centers)
            if mask.any():
                lp += gp_log_marginal(X[mask], y[mask], np.exp(z["log_ell"]),
                                      np.exp(z["log_sf2"]), np.exp(z["log_sn2"]),
                                      z["m0"], diffsq[:, mask][:, :, mask])
            return lp

        # warm-up: tune hyperparameter proposal scales on the initial split
        init = {
            "log_ell": np.asarray(centers["log_ell"], dtype=float).copy(),
            "log_sf2": centers["log_sf2"],
            "log_sn2": centers["log_sn2"],
            "m0": centers["m0"],
        }
        warm_cfg = MhConfig(steps=max(400, self.mh.steps // 4), burn_fraction=0.5,
                            thinning=5, init_scale=gp_hyper_scales(centers),
                            target_accept=self.mh.target_accept,
                            pool_cap=self.mh.pool_cap, adapt_batch=self.mh.adapt_batch)
        warm_pool = mh_infer(lambda z: theta_target(z, clean), init, warm_cfg,
                             derive_seed(chain_seed, (1,)))
        space: ParamSpace = warm_pool.meta["space"]
        scales = warm_pool.meta["scales"]
        v = space.pack(warm_pool.samples[-1])
        lp = theta_target(space.unpack(v), clean)

        # alternation: RWM on hyperparameters, Gibbs on the indicators, the
        # weight, and the contamination interval's lower bound
        rng = np.random.default_rng(derive_seed(chain_seed, (2,)))
        kept = []
        accepted = 0
        proposed = 0
        n_keep = max(1, self.sweeps // 2)
        for sweep in range(self.sweeps):
            for _ in range(self.theta_steps):
                prop = v + scales * rng.standard_normal(space.dim)
                lp_prop = theta_target(space.unpack(prop), clean)
                proposed += 1
                if np.log(rng.uniform()) < lp_prop - lp:
                    v, lp = prop, lp_prop
                    accepted += 1
            z = space.unpack(v)
            clean = _gibbs_indicators(X, y, clean, z, wc, lo_c, hi, rng)
            wc = rng.beta(_WC_A + (~clean).sum(), _WC_B + clean.sum())
            lo_c = _gibbs_interval_lo(y, clean, lo_min, hi, rng)
            lp = theta_target(z, clean)
            if sweep >= self.sweeps - n_keep:
                state = dict(z)
                state["wc"] = float(wc)
                state["cont_lo"] = float(lo_c)
                state["clean_mask"] = clean.copy()
                kept.append(state)
        pool = SamplePool(kept, meta={
            "X": X, "y": y, "hi": hi,
            "accept_rate": accepted / max(proposed, 1),
        })
        return pool

    def _prior_pool(self, centers, chain_seed) -> SamplePool:
        cfg = MhConfig(steps=self.mh.steps, init_scale=gp_hyper_scales(centers))
        init = {
            "log_ell": np.asarray(centers["log_ell"], dtype=float).copy(),
            "log_sf2": centers["log_sf2"],
            "log_sn2": centers["log_sn2"],
            "m0": centers["m0"],
        }
        pool = mh_infer(lambda z: gp_hyper_logprior(z, centers), init, cfg, chain_seed)
        rng = np.random.default_rng(derive_seed(chain_seed, (3,)))
        samples = []
        for z in pool.samples:
            z2 = dict(z)
            z2["wc"] = float(rng.beta(_WC_A, _WC_B))
            z2["cont_lo"] = -1.0
            z2["clean_mask"] = np.zeros(0, dtype=bool)
            samples.append(z2)
        return SamplePool(samples, meta={"X": None, "y": None, "hi": 1.0,
                                         "accept_rate": pool.meta["accept_rate"]})

    # ------------------------------------------------------------------
    def _enrich(self, handle: SamplePool, idx: int) -> dict:
        cached = handle.cache.get(idx)
        if cached is not None:
            return cached
        z = dict(handle.samples[idx])
        z["_interval"] = (z["cont_lo"], handle.meta["hi"])
        X, y = handle.meta["X"], handle.meta["y"]
        mask = z["clean_mask"]
        if X is not None and mask.any():
            z["_pred"] = gp_cache(X[mask], y[mask], z)
        else:
            z["_pred"] = gp_cache(None, None, z)
        handle.cache[idx] = z
        return z

    def system_moments(self, z: dict, x, x_key: bytes | None = None):
        """Clean-channel predictive mean and variance at one input."""
        return gp_cached_moments(z["_pred"], x, x_key)

    def gen(self, x, z: dict, seed: int) -> Observation:
        if seed_uniform(derive_seed(seed, (_PICK_STREAM,))) < z["wc"]:
            lo, hi = z["_interval"]
            yv = lo + (hi - lo) * seed_uniform(derive_seed(seed, (_UNIF_STREAM,)))
            return Observation(float(yv))
        x = np.asarray(x, dtype=float)
        mu, var = self.system_moments(z, x, x.tobytes())
        yv = mu + np.sqrt(var) * seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        return Observation(float(yv))

    def predictive_density(self, z: dict, x, ys) -> np.ndarray:
        """Mixture predictive density at one input over a grid of outputs."""
        ys = np.asarray(ys, dtype=float)
        mu, var = self.system_moments(z, x)
        lo, hi = z["_interval"]
        norm_part = np.exp(-0.5 * (ys - mu) ** 2 / var) / np.sqrt(2.0 * np.pi * var)
        unif_part = np.where((ys >= lo) & (ys <= hi), 1.0 / (hi - lo), 0.0)
        return (1.0 - z["wc"]) * norm_part + z["wc"] * unif_part

    def posterior_mean_clean(self, handle: SamplePool, Xq: np.ndarray) -> np.ndarray:
        """Pool-averaged clean-channel predictive mean over query rows."""
        Xq = np.atleast_2d(Xq)
        acc = np.zeros(len(Xq))
        for idx in range(len(handle)):
            z = self._enrich(handle, idx)
            acc += np.array([self.system_moments(z, xq)[0] for xq in Xq])
        return acc / len(handle)


def _gibbs_indicators(X, y, clean, z, wc, lo_c, hi, rng) -> np.ndarray:
    """One Gibbs sweep over the per-point contamination indicators.

    Each point is scored by the GP predictive conditioned on the other
    currently-clean points versus the uniform contamination density,
    which is zero below the interval's lower bound.
    """
    clean = clean.copy()
    hyper = {k: z[k] for k in ("log_ell", "log_sf2", "log_sn2", "m0")}
    log_wc = np.log(wc)
    log_ws = np.log1p(-wc)
    log_udens = -np.log(hi - lo_c)
    for i in rng.permutation(len(y)):
        if y[i] < lo_c:
            clean[i] = True
            continue
        others = clean.copy()
        others[i] = False
        if others.any():
            cache = gp_cache(X[others], y[others], hyper)
        else:
            cache = gp_cache(None, None, hyper)
        mu, var = gp_cached_moments(cache, X[i])
        log_clean = log_ws - 0.5 * (y[i] - mu) ** 2 / var - 0.5 * np.log(2.0 * np.pi * var)
        log_cont = log_wc + log_udens
        clean[i] = rng.uniform() < expit(log_clean - log_cont)
    return clean


def _gibbs_interval_lo(y, clean, lo_min, hi, rng) -> float:
    """Exact conditional draw of the contamination interval's lower bound.

    Given k contaminated values the density is proportional to
    (hi - lo)^(-k) on [lo_min, min of contaminated values]; substituting
    s = log(hi - lo) turns it into a truncated exponential.
    """
    b = float(y[~clean].min()) if (~clean).any() else hi
    k = int((~clean).sum())
    s_hi = np.log(hi - lo_min)        # corresponds to lo = lo_min
    s_lo = np.log(max(hi - b, 1e-12))  # corresponds to lo = b
    if s_lo >= s_hi:
        return lo_min
    u = rng.uniform()
    rate = k - 1.0
    if abs(rate) < 1e-12:
        s = s_lo + u * (s_hi - s_lo)
    else:
        # density in s is proportional to exp(-rate * (s - s_lo))
        span = s_hi - s_lo
        z = -np.log1p(u * np.expm1(-rate * span)) / rate
        s = s_lo + z
    return float(hi - np.exp(s))


def _robust_clean_guess(X: np.ndarray, y: np.ndarray, k: int = 6) -> np.ndarray:
    """Initial clean/contaminated split from local-median residuals."""
    n = len(y)
    if n <= 3:
        return np.ones(n, dtype=bool)
    k = min(k, n)
    D = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    resid = np.empty(n)
    for i in range(n):
        nearest = np.argsort(D[i])[:k]
        resid[i] = y[i] - np.median(y[nearest])
    mad = np.median(np.abs(resid - np.median(resid))) + 1e-9
    return np.abs(resid) <= 4.0 * 1.4826 * mad
