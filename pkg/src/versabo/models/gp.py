"""Gaussian-process regression model with sampled hyperparameters.

Squared-exponential kernel with per-dimension lengthscales, observation
noise, and a constant mean.  ``infer`` samples the hyperparameter
posterior (marginal likelihood times weakly informative, data-scaled
priors) with the shared Metropolis engine; ``gen`` draws from the exact
GP predictive under one hyperparameter sample.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from ..core import Dataset, Model, Observation, SamplePool, derive_seed, seed_normal
from .mh import MhConfig, mh_infer

__all__ = [
    "GpModel",
    "gp_predict",
    "se_kernel",
    "chol_with_jitter",
    "gp_log_marginal",
    "gp_cache",
    "gp_cached_moments",
]

_NOISE_STREAM = 11


def se_kernel(X1: np.ndarray, X2: np.ndarray, ell: np.ndarray, sf2: float) -> np.ndarray:
    """Squared-exponential kernel matrix (no noise term)."""
    A = X1 / ell
    B = X2 / ell
    sq = (
        (A * A).sum(axis=1)[:, None]
        - 2.0 * (A @ B.T)
        + (B * B).sum(axis=1)[None, :]
    )
    return sf2 * np.exp(-0.5 * np.maximum(sq, 0.0))


def chol_with_jitter(K: np.ndarray):
    """Lower Cholesky factor, escalating diagonal jitter on failure.

    Jitter starts at 1e-10 of the mean diagonal and grows tenfold up to
    1e-4 of it before giving up.
    """
    scale = float(np.mean(np.diag(K))) or 1.0
    jitter = 1e-10 * scale
    last_err = None
    while jitter <= 1e-4 * scale:
        try:
            return np.linalg.cholesky(K + jitter * np.eye(len(K)))
        except np.linalg.LinAlgError as err:
            last_err = err
            jitter *= 10.0
    raise np.linalg.LinAlgError(f"covariance not factorizable even with jitter: {last_err}")


def gp_log_marginal(X: np.ndarray, y: np.ndarray, ell, sf2, sn2, m0,
                    diffsq: np.ndarray | None = None) -> float:
    """Log marginal likelihood of observations under one hyperparameter set.

    ``diffsq`` optionally carries the precomputed per-dimension squared
    coordinate differences, shape (d, n, n).
    """
    n = len(y)
    if diffsq is not None:
        sq = np.tensordot(1.0 / (ell * ell), diffsq, axes=(0, 0))
        K = sf2 * np.exp(-0.5 * sq)
    else:
        K = se_kernel(X, X, ell, sf2)
    K[np.diag_indices_from(K)] += sn2
    L = chol_with_jitter(K)
    r = y - m0
    alpha = solve_triangular(L, r, lower=True)
    return float(
        -0.5 * alpha @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * np.log(2.0 * np.pi)
    )


def gp_cache(X, y, hyper: dict) -> dict:
    """Precompute the predictive structures for one hyperparameter sample.

    Conditioning data may be empty (prior predictive).  The cache is
    immutable once built and safe to share.
    """
    ell = np.exp(np.atleast_1d(np.asarray(hyper["log_ell"], dtype=float)))
    sf2 = float(np.exp(hyper["log_sf2"]))
    sn2 = float(np.exp(hyper["log_sn2"]))
    m0 = float(hyper["m0"])
    cache = {"ell": ell, "sf2": sf2, "sn2": sn2, "m0": m0, "Xs": None}
    if X is not None and len(X) > 0:
        K = se_kernel(X, X, ell, sf2)
        K[np.diag_indices_from(K)] += sn2
        L = chol_with_jitter(K)
        Kinv = cho_solve((L, True), np.eye(len(K)))
        Xs = X / ell
        cache["Xs"] = Xs
        cache["Xs_norm"] = (Xs * Xs).sum(axis=1)
        # signal variance folded into the weights so queries scale one vector
        cache["alpha2"] = sf2 * cho_solve((L, True), np.asarray(y, dtype=float) - m0)
        cache["Kinv2"] = (sf2 * sf2) * Kinv
    return cache


def gp_cached_moments(cache: dict, x, x_key: bytes | None = None) -> tuple[float, float]:
    """Predictive mean and variance (noise included) at one input.

    ``x_key`` enables a one-slot memo: repeated queries at the same input
    under the same latent sample (the common case inside one acquisition
    evaluation) skip the linear algebra.
    """
    if cache["Xs"] is None:
        return cache["m0"], cache["sf2"] + cache["sn2"]
    if x_key is not None:
        memo = cache.get("_memo")
        if memo is not None and memo[0] == x_key:
            return memo[1], memo[2]
    xs = np.asarray(x, dtype=float) / cache["ell"]
    sq = cache["Xs_norm"] - 2.0 * (cache["Xs"] @ xs) + xs @ xs
    e = np.exp(-0.5 * sq)
    mu = cache["m0"] + e @ cache["alpha2"]
    var = cache["sf2"] + cache["sn2"] - e @ (cache["Kinv2"] @ e)
    mu, var = float(mu), float(max(var, 1e-12))
    if x_key is not None:
        cache["_memo"] = (x_key, mu, var)
    return mu, var


def gp_predict(X, y, hyper: dict, Xq: np.ndarray):
    """Exact GP predictive mean and variance of new observations.

    ``hyper`` holds log_ell, log_sf2, log_sn2, m0.  Returns (mu, var)
    arrays over query rows; the variance includes observation noise.
    With no training data this is the prior: mean m0, variance sf2 + sn2.
    """
    cache = gp_cache(X, y, hyper)
    Xq = np.atleast_2d(Xq)
    out = np.array([gp_cached_moments(cache, xq) for xq in Xq])
    return out[:, 0], out[:, 1]


def data_scaled_defaults(data: Dataset, box=None) -> dict:
    """Prior centers for the GP hyperparameters, scaled to the data."""
    if len(data) > 0:
        X = data.inputs()
        y = data.objectives()
        if box is not None:
            span = np.asarray(box.span, dtype=float)
        else:
            span = X.max(axis=0) - X.min(axis=0)
        span = np.where(span > 0, span, 1.0)
        var_y = max(float(np.var(y)), 1e-4)
        mean_y = float(np.mean(y))
    else:
        d = box.dim if box is not None else 1
        span = np.asarray(box.span, dtype=float) if box is not None else np.ones(d)
        var_y, mean_y = 1.0, 0.0
    return {
        "log_ell": np.log(span / 4.0),
        "log_sf2": float(np.log(var_y)),
        "log_sn2": float(np.log(0.01 * var_y)),
        "m0": mean_y,
        "m0_sd": float(np.sqrt(var_y)),
    }


def gp_hyper_logprior(z: dict, centers: dict) -> float:
    """Independent unit-variance normal priors around the data-scaled centers."""
    lp = -0.5 * float(np.sum((z["log_ell"] - centers["log_ell"]) ** 2))
    lp += -0.5 * (z["log_sf2"] - centers["log_sf2"]) ** 2
    lp += -0.5 * (z["log_sn2"] - centers["log_sn2"]) ** 2
    lp += -0.5 * ((z["m0"] - centers["m0"]) / centers["m0_sd"]) ** 2
    return lp


def gp_hyper_scales(centers: dict) -> dict:
    return {"log_ell": 0.15, "log_sf2": 0.15, "log_sn2": 0.15,
            "m0": 0.2 * centers["m0_sd"]}


class GpModel(Model):
    """GP regression over the objective channel with MH-sampled hyperparameters."""

    def __init__(self, box=None, mh: MhConfig | None = None, seed: int = 0):
        self.box = box
        self.mh = mh or MhConfig()
        self.seed = seed
        self._infer_count = 0

    def infer(self, data: Dataset) -> SamplePool:
        self._infer_count += 1
        chain_seed = derive_seed(self.seed, (901, self._infer_count))
        centers = data_scaled_defaults(data, self.box)
        if len(data) > 0:
            X = data.inputs()
            y = data.objectives()
            diffsq = np.moveaxis((X[:, None, :] - X[None, :, :]) ** 2, 2, 0)

            def log_target(z):
                return gp_log_marginal(
                    X, y, np.exp(z["log_ell"]), np.exp(z["log_sf2"]),
                    np.exp(z["log_sn2"]), z["m0"], diffsq,
                ) + gp_hyper_logprior(z, centers)
        else:

            def log_target(z):
                return gp_hyper_logprior(z, centers)

        init = {
            "log_ell": np.asarray(centers["log_ell"], dtype=float).copy(),
            "log_sf2": centers["log_sf2"],
            "log_sn2": centers["log_sn2"],
            "m0": centers["m0"],
        }
        cfg = MhConfig(steps=self.mh.steps, burn_fraction=self.mh.burn_fraction,
                       thinning=self.mh.thinning, init_scale=gp_hyper_scales(centers),
                       target_accept=self.mh.target_accept, pool_cap=self.mh.pool_cap,
                       adapt_batch=self.mh.adapt_batch)
        pool = mh_infer(log_target, init, cfg, chain_seed)
        pool.meta["X"] = data.inputs() if len(data) > 0 else None
        pool.meta["y"] = data.objectives() if len(data) > 0 else None
        return pool

    def _enrich(self, handle: SamplePool, idx: int) -> dict:
        cached = handle.cache.get(idx)
        if cached is not None:
            return cached
        z = dict(handle.samples[idx])
        z["_pred"] = gp_cache(handle.meta["X"], handle.meta["y"], z)
        handle.cache[idx] = z
        return z

    def gen(self, x, z: dict, seed: int) -> Observation:
        cache = z.get("_pred")
        if cache is None:
            cache = gp_cache(z.get("_X_train"), z.get("_y_train"), z)
        x = np.asarray(x, dtype=float)
        mu, var = gp_cached_moments(cache, x, x.tobytes())
        y = mu + np.sqrt(var) * seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        return Observation(float(y))

    def posterior_mean(self, handle: SamplePool, Xq: np.ndarray) -> np.ndarray:
        """Pool-averaged predictive mean over query rows."""
        Xq = np.atleast_2d(Xq)
        acc = np.zeros(len(Xq))
        for idx in range(len(handle)):
            cache = self._enrich(handle, idx)["_pred"]
            acc += np.array([gp_cached_moments(cache, xq)[0] for xq in Xq])
        return acc / len(handle)
