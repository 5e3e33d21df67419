"""Warp model for structured multi-task regression.

A single zero-mean latent GP underlies every task; each task t observes
an affine warp of it, y = w0_t + w1_t'x + w2_t z(x) + noise, with
task-specific warp coefficients.  Latent function values are marginalized
analytically, so inference runs only over the GP hyperparameters, the
warp coefficients, and the noise variance.  An optional context vector
shifts the warp offset linearly (contextual variant).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from ..core import Dataset, Model, Observation, SamplePool, derive_seed, seed_normal
from .gp import chol_with_jitter, se_kernel
from .mh import MhConfig, mh_infer

__all__ = ["WarpModel"]

_Z_STREAM = 41
_NOISE_STREAM = 11


class WarpModel(Model):
    """Affine per-task warps of a shared latent GP.

    Parameters
    ----------
    box : SearchBox
        Input space (used for lengthscale prior scaling).
    n_tasks : int
        Number of tasks; observations carry aux["task"] in 1..n_tasks.
    fixed_hyper : dict, optional
        Freeze {"log_ell", "log_sf2"} instead of inferring them, pinning
        the latent scale (useful when warp coefficients themselves are the
        quantity of interest).
    context_dim : int
        When positive, observations carry aux["context"] and the warp
        offset gains a shared linear term in the context vector.
    query_task : int
        Task emitted by ``gen`` when no explicit task is passed.
    """

    def __init__(self, box, n_tasks: int = 2, mh: MhConfig | None = None, seed: int = 0,
                 fixed_hyper: dict | None = None, context_dim: int = 0, query_task: int = 1):
        self.box = box
        self.n_tasks = int(n_tasks)
        self.mh = mh or MhConfig()
        self.seed = seed
        self.fixed_hyper = dict(fixed_hyper) if fixed_hyper else None
        self.context_dim = int(context_dim)
        self.query_task = int(query_task)
        self._infer_count = 0

    def infer(self, data: Dataset) -> SamplePool:
        self._infer_count += 1
        chain_seed = derive_seed(self.seed, (906, self._infer_count))
        T, d = self.n_tasks, self.box.dim
        n = len(data)
        if n > 0:
            X = data.inputs()
            y = data.objectives()
            tasks = np.array([int(t) for t in data.aux_column("task", 1)])
            if np.any(tasks < 1) or np.any(tasks > T):
                raise ValueError("observation task index outside 1..n_tasks")
            ti = tasks - 1
            C = None
            if self.context_dim > 0:
                C = np.array([np.asarray(c, dtype=float) for c in data.aux_column("context")])
            var_y = max(float(np.var(y)), 1e-4)
        else:
            X = y = ti = C = None
            var_y = 1.0
        span = np.asarray(self.box.span, dtype=float)
        ell_c = np.log(span / 4.0)
        sf2_c = float(np.log(var_y))
        fixed = self.fixed_hyper

        def log_target(z):
            log_ell = fixed["log_ell"] if fixed else z["log_ell"]
            log_sf2 = fixed["log_sf2"] if fixed else z["log_sf2"]
            lp = 0.0
            if not fixed:
                lp += -0.5 * float(np.sum((z["log_ell"] - ell_c) ** 2))
                # tight prior: the latent scale gauge is otherwise only
                # weakly identified against the per-task w2 coefficients
                lp += -0.5 * (z["log_sf2"] - sf2_c) ** 2 / 0.09
            lp += -0.5 * float(np.sum(z["w0"] ** 2)) / 4.0
            lp += -0.5 * float(np.sum(z["w1"] ** 2))
            lp += -0.5 * float(np.sum((z["w2"] - 1.0) ** 2)) / 0.25
            lp += -0.5 * (z["log_eps"] + 2.0) ** 2
            if self.context_dim > 0:
                lp += -0.5 * float(np.sum(z["gamma"] ** 2))
            if X is None:
                return lp
            mean = z["w0"][ti] + np.einsum("ij,ij->i", z["w1"][ti], X)
            if C is not None:
                mean = mean + C @ z["gamma"]
            a_vec = z["w2"][ti]
            K = se_kernel(X, X, np.exp(np.atleast_1d(log_ell)), float(np.exp(log_sf2)))
            Cov = K * np.outer(a_vec, a_vec)
            Cov[np.diag_indices_from(Cov)] += np.exp(z["log_eps"]) + 1e-10
            try:
                L = np.linalg.cholesky(Cov)
            except np.linalg.LinAlgError:
                return -np.inf
            u = solve_triangular(L, y - mean, lower=True)
            lp += -0.5 * float(u @ u) - float(np.log(np.diag(L)).sum()) - 0.5 * n * np.log(2.0 * np.pi)
            return lp

        init = {}
        if not fixed:
            init["log_ell"] = ell_c.copy()
            init["log_sf2"] = sf2_c
        w0_init = np.zeros(T)
        if y is not None:
            for t in range(T):
                sel = ti == t
                if np.any(sel):
                    w0_init[t] = float(np.mean(y[sel]))
        init.update({
            "w0": w0_init,
            "w1": np.zeros((T, d)),
            "w2": np.ones(T),
            "log_eps": -2.0,
        })
        if self.context_dim > 0:
            init["gamma"] = np.zeros(self.context_dim)
        scales = {"log_ell": 0.15, "log_sf2": 0.15, "w0": 0.2, "w1": 0.1,
                  "w2": 0.1, "log_eps": 0.2, "gamma": 0.1}
        cfg = MhConfig(steps=self.mh.steps, burn_fraction=self.mh.burn_fraction,
                       thinning=self.mh.thinning, init_scale=scales,
                       target_accept=self.mh.target_accept, pool_cap=self.mh.pool_cap,
                       adapt_batch=self.mh.adapt_batch)
        pool = mh_infer(log_target, init, cfg, chain_seed)
        pool.meta.update({"X": X, "y": y, "ti": ti, "C": C})
        return pool

    def _hyper_of(self, z: dict):
        if self.fixed_hyper:
            return (np.exp(np.atleast_1d(self.fixed_hyper["log_ell"])),
                    float(np.exp(self.fixed_hyper["log_sf2"])))
        return np.exp(np.atleast_1d(z["log_ell"])), float(np.exp(z["log_sf2"]))

    def _enrich(self, handle: SamplePool, idx: int) -> dict:
        cached = handle.cache.get(idx)
        if cached is not None:
            return cached
        z = dict(handle.samples[idx])
        X, y, ti, C = (handle.meta[k] for k in ("X", "y", "ti", "C"))
        ell, sf2 = self._hyper_of(z)
        z["_ell"], z["_sf2"] = ell, sf2
        if X is not None:
            mean = z["w0"][ti] + np.einsum("ij,ij->i", z["w1"][ti], X)
            if C is not None:
                mean = mean + C @ z["gamma"]
            a_vec = z["w2"][ti]
            K = se_kernel(X, X, ell, sf2)
            Cov = K * np.outer(a_vec, a_vec)
            Cov[np.diag_indices_from(Cov)] += np.exp(z["log_eps"]) + 1e-10
            L = chol_with_jitter(Cov)
            z["_X"] = X
            z["_a_vec"] = a_vec
            z["_Cinv"] = cho_solve((L, True), np.eye(len(Cov)))
            z["_resid_solved"] = cho_solve((L, True), y - mean)
        else:
            z["_X"] = None
        handle.cache[idx] = z
        return z

    def latent_moments(self, z: dict, x) -> tuple[float, float]:
        """Posterior mean and variance of the latent GP value at one input."""
        ell, sf2 = z.get("_ell"), z.get("_sf2")
        if ell is None:
            ell, sf2 = self._hyper_of(z)
        if z.get("_X") is None:
            return 0.0, sf2
        ks = se_kernel(z["_X"], np.atleast_2d(np.asarray(x, dtype=float)), ell, sf2)[:, 0]
        cvec = z["_a_vec"] * ks
        mu = float(cvec @ z["_resid_solved"])
        var = sf2 - float(cvec @ (z["_Cinv"] @ cvec))
        return mu, max(var, 1e-12)

    def gen(self, x, z: dict, seed: int, task: int | None = None,
            context=None) -> Observation:
        t = self.query_task if task is None else int(task)
        if not 1 <= t <= self.n_tasks:
            raise ValueError(f"unknown task {t}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        mu_z, var_z = self.latent_moments(z, x)
        z_draw = mu_z + np.sqrt(var_z) * seed_normal(derive_seed(seed, (_Z_STREAM,)))
        mean = z["w0"][t - 1] + float(z["w1"][t - 1] @ x) + z["w2"][t - 1] * z_draw
        if self.context_dim > 0 and context is not None:
            mean += float(np.asarray(context, dtype=float) @ z["gamma"])
        eps = np.sqrt(np.exp(z["log_eps"])) * seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        return Observation(float(mean + eps), {"task": t})
