"""Switching model: an input-dependent classifier gates two regressors.

Observations carry a small integer state label.  A Bayesian logistic
classifier over polynomial features predicts the state; state-1 outputs
follow a GP regression component and state-0 outputs a plain Gaussian
(mean and variance).  Suited to systems with pass/fail or timeout
regions that return a fixed sentinel objective.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, log_expit

from ..core import Dataset, Model, Observation, SamplePool, derive_seed, seed_normal, seed_uniform
from .gp import (
    data_scaled_defaults,
    gp_cache,
    gp_cached_moments,
    gp_hyper_logprior,
    gp_hyper_scales,
    gp_log_marginal,
)
from .mh import MhConfig, mh_infer

__all__ = ["SwitchingModel", "poly_features"]

_STATE_STREAM = 21
_NOISE_STREAM = 11
_G2_STREAM = 77

# weakly informative normal-inverse-gamma prior for the state-0 Gaussian
_NIG_KAPPA0 = 0.01
_NIG_ALPHA0 = 2.0


def poly_features(x) -> np.ndarray:
    """Classifier features: constant, linear, and squared coordinates."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.concatenate(([1.0], x, x * x))


class SwitchingModel(Model):
    """Classifier-gated mixture of a GP component and a Gaussian component.

    The classifier weights and the GP hyperparameters are sampled with the
    Metropolis engine; the Gaussian component's mean and variance are drawn
    from their exact conjugate posterior given the state-0 observations.
    """

    def __init__(self, box, mh: MhConfig | None = None, seed: int = 0):
        self.box = box
        self.mh = mh or MhConfig()
        self.seed = seed
        self._infer_count = 0

    def infer(self, data: Dataset) -> SamplePool:
        self._infer_count += 1
        chain_seed = derive_seed(self.seed, (904, self._infer_count))
        states = np.array([1 if s is None else int(s) for s in data.aux_column("state")])
        X = data.inputs() if len(data) > 0 else None
        y = data.objectives() if len(data) > 0 else None
        if X is not None:
            Phi = np.array([poly_features(xi) for xi in X])
            mask1 = states == 1
            X1, y1 = X[mask1], y[mask1]
            y0 = y[~mask1]
            d = X.shape[1]
        else:
            Phi = None
            X1 = y1 = y0 = None
            d = self.box.dim
        sub1 = _subset_dataset(X1, y1)
        centers = data_scaled_defaults(sub1, self.box)
        if X1 is not None and len(X1) > 0:
            diffsq = np.moveaxis((X1[:, None, :] - X1[None, :, :]) ** 2, 2, 0)
        else:
            diffsq = None

        def log_target(z):
            lp = -0.5 * float(np.sum(z["w"] ** 2)) / 4.0
            lp += gp_hyper_logprior(z, centers)
            if Phi is not None:
                t = Phi @ z["w"]
                lp += float(np.sum(np.where(states == 1, log_expit(t), log_expit(-t))))
            if X1 is not None and len(X1) > 0:
                lp += gp_log_marginal(X1, y1, np.exp(z["log_ell"]), np.exp(z["log_sf2"]),
                                      np.exp(z["log_sn2"]), z["m0"], diffsq)
            return lp

        init = {
            "w": np.zeros(1 + 2 * d),
            "log_ell": np.asarray(centers["log_ell"], dtype=float).copy(),
            "log_sf2": centers["log_sf2"],
            "log_sn2": centers["log_sn2"],
            "m0": centers["m0"],
        }
        scales = dict(gp_hyper_scales(centers))
        scales["w"] = 0.25
        cfg = MhConfig(steps=self.mh.steps, burn_fraction=self.mh.burn_fraction,
                       thinning=self.mh.thinning, init_scale=scales,
                       target_accept=self.mh.target_accept, pool_cap=self.mh.pool_cap,
                       adapt_batch=self.mh.adapt_batch)
        pool = mh_infer(log_target, init, cfg, chain_seed)

        # exact conjugate draws for the state-0 Gaussian, one per pool sample
        mu_n, kappa_n, alpha_n, beta_n = _nig_posterior(y0, y)
        rng = np.random.default_rng(derive_seed(chain_seed, (_G2_STREAM,)))
        v2 = beta_n / rng.gamma(alpha_n, size=len(pool))
        m2 = mu_n + np.sqrt(v2 / kappa_n) * rng.standard_normal(len(pool))
        samples = []
        for i, z in enumerate(pool.samples):
            z2 = dict(z)
            z2["m2"] = float(m2[i])
            z2["v2"] = float(v2[i])
            samples.append(z2)
        out = SamplePool(samples, meta=dict(pool.meta))
        out.meta["X1"] = X1
        out.meta["y1"] = y1
        return out

    def _enrich(self, handle: SamplePool, idx: int) -> dict:
        cached = handle.cache.get(idx)
        if cached is not None:
            return cached
        z = dict(handle.samples[idx])
        z["_pred"] = gp_cache(handle.meta.get("X1"), handle.meta.get("y1"), z)
        handle.cache[idx] = z
        return z

    def component_prob(self, z: dict, x) -> float:
        """Probability that the query lands in the GP (state-1) component."""
        return float(expit(poly_features(x) @ z["w"]))

    def gen(self, x, z: dict, seed: int) -> Observation:
        x = np.asarray(x, dtype=float)
        xb = x.tobytes() + np.asarray(z["w"]).tobytes()
        memo = z.get("_pmemo")
        if memo is not None and memo[0] == xb:
            p1 = memo[1]
        else:
            p1 = self.component_prob(z, x)
            z["_pmemo"] = (xb, p1)
        c = 1 if seed_uniform(derive_seed(seed, (_STATE_STREAM,))) < p1 else 0
        eps = seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        if c == 1:
            cache = z.get("_pred")
            if cache is None:
                cache = gp_cache(z.get("_X_train"), z.get("_y_train"), z)
            mu, var = gp_cached_moments(cache, x, xb)
            return Observation(float(mu + np.sqrt(var) * eps), {"state": 1})
        return Observation(float(z["m2"] + np.sqrt(z["v2"]) * eps), {"state": 0})


def _subset_dataset(X1, y1):
    """Dataset view over the state-1 subset, for prior scaling only."""
    data = Dataset()
    if X1 is not None:
        for xi, yi in zip(X1, y1):
            data = data.append(xi, Observation(float(yi)))
    return data


def _nig_posterior(y0, y_all):
    """Normal-inverse-gamma posterior parameters for the state-0 Gaussian."""
    if y_all is not None and len(y_all) > 0:
        mu0 = float(np.mean(y_all))
        beta0 = 0.01 * max(float(np.var(y_all)), 1e-6) + 1e-8
    else:
        mu0, beta0 = 0.0, 0.01
    if y0 is None or len(y0) == 0:
        return mu0, _NIG_KAPPA0, _NIG_ALPHA0, beta0
    k = len(y0)
    ybar = float(np.mean(y0))
    kappa_n = _NIG_KAPPA0 + k
    mu_n = (_NIG_KAPPA0 * mu0 + k * ybar) / kappa_n
    alpha_n = _NIG_ALPHA0 + 0.5 * k
    ss = float(np.sum((y0 - ybar) ** 2))
    beta_n = beta0 + 0.5 * ss + 0.5 * _NIG_KAPPA0 * k * (ybar - mu0) ** 2 / kappa_n
    return mu_n, kappa_n, alpha_n, beta_n
