"""Adaptive random-walk Metropolis engine shared by the model zoo.

Latent states are named maps of scalars and vectors; the engine flattens
them and runs a Gaussian random-walk chain.  During burn-in, per-parameter
proposal scales are refit to the chain's recent spread while a global
factor chases a target acceptance rate; both freeze afterwards, and the
thinned post-burn-in states form the sample pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import SamplePool

__all__ = ["MhConfig", "ParamSpace", "mh_infer"]


@dataclass(frozen=True)
class MhConfig:
    """Chain length, burn-in, thinning, and adaptation settings."""

    steps: int = 5000
    burn_fraction: float = 0.5
    thinning: int = 5
    init_scale: float | dict = 0.25
    target_accept: float = 0.23
    pool_cap: int = 500
    adapt_batch: int = 50

    def __post_init__(self):
        if self.steps <= 0:
            raise ValueError("steps must be positive")
        if not 0.0 <= self.burn_fraction < 1.0:
            raise ValueError("burn_fraction must lie in [0, 1)")
        if self.thinning < 1 or self.pool_cap < 1:
            raise ValueError("thinning and pool_cap must be >= 1")


class ParamSpace:
    """Flattening between named latent maps and a single parameter vector."""

    def __init__(self, template: dict):
        self.names = list(template.keys())
        self.shapes = [np.shape(template[k]) for k in self.names]
        self.sizes = [int(np.prod(s)) if s else 1 for s in self.shapes]
        self.dim = sum(self.sizes)
        self._offsets = np.cumsum([0] + self.sizes)

    def pack(self, sample: dict) -> np.ndarray:
        vec = np.empty(self.dim)
        for k, (name, size) in enumerate(zip(self.names, self.sizes)):
            vec[self._offsets[k]:self._offsets[k] + size] = np.ravel(sample[name])
        return vec

    def unpack(self, vec: np.ndarray) -> dict:
        out = {}
        for k, name in enumerate(self.names):
            chunk = vec[self._offsets[k]:self._offsets[k + 1]]
            shape = self.shapes[k]
            out[name] = float(chunk[0]) if shape == () else chunk.reshape(shape).copy()
        return out

    def scale_vector(self, init_scale) -> np.ndarray:
        if np.isscalar(init_scale):
            return np.full(self.dim, float(init_scale))
        vec = np.empty(self.dim)
        for k, name in enumerate(self.names):
            s = init_scale.get(name, 0.25)
            vec[self._offsets[k]:self._offsets[k + 1]] = s
        return vec


def mh_infer(log_target, init: dict, config: MhConfig, seed: int) -> SamplePool:
    """Run the adaptive random-walk chain and return the thinned sample pool.

    ``log_target`` maps a named latent sample to an (unnormalized) log
    density; it must be finite at ``init``.  Proposal scales start from
    ``config.init_scale`` per parameter; during burn-in they are re-fit
    to the chain's per-parameter spread while a single global factor is
    driven toward ``config.target_accept``, then everything is frozen.
    The same seed always yields the same pool.
    """
    space = ParamSpace(init)
    v = space.pack(init)
    lp = float(log_target(space.unpack(v)))
    if not np.isfinite(lp):
        raise ValueError("log target is not finite at the initial state")

    rng = np.random.default_rng(seed)
    init_scales = space.scale_vector(config.init_scale)
    scales = init_scales.copy()
    factor = 1.0
    n_burn = int(config.steps * config.burn_fraction)
    refit_window = max(4 * config.adapt_batch, 150)
    refit_cutoff = int(0.7 * n_burn)  # leave the tail for step-size settling

    # windowed per-parameter moments of the burn-in chain; the window
    # restarts after each refit so scales can track a sharpening posterior
    w_count = 0
    w_mean = np.zeros(space.dim)
    w_m2 = np.zeros(space.dim)

    kept = []
    accepted_total = 0
    accepted_batch = 0
    accepted_post = 0
    batches_since_refit = 0

    for step in range(1, config.steps + 1):
        prop = v + factor * scales * rng.standard_normal(space.dim)
        lp_prop = float(log_target(space.unpack(prop)))
        if np.log(rng.uniform()) < lp_prop - lp:
            v = prop
            lp = lp_prop
            accepted_total += 1
            accepted_batch += 1
            if step > n_burn:
                accepted_post += 1
        if step <= n_burn:
            w_count += 1
            delta = v - w_mean
            w_mean += delta / w_count
            w_m2 += delta * (v - w_mean)
            if step % config.adapt_batch == 0:
                batches_since_refit += 1
                rate = accepted_batch / config.adapt_batch
                gamma = max(min(0.5, 1.0 / np.sqrt(batches_since_refit)), 0.15)
                factor *= float(np.exp(gamma * (rate - config.target_accept)))
                accepted_batch = 0
                if w_count >= refit_window and step <= refit_cutoff:
                    chain_sd = np.sqrt(w_m2 / (w_count - 1))
                    moved = chain_sd > 0
                    if np.any(moved):
                        # stuck coordinates shrink relative to moving ones;
                        # blend geometrically (toward the window) to damp noise
                        floor = 0.01 * chain_sd[moved].max()
                        new = np.maximum(chain_sd, floor)
                        scales = scales**0.25 * new**0.75
                        batches_since_refit = 0
                    w_count = 0
                    w_mean[:] = 0.0
                    w_m2[:] = 0.0
        if step > n_burn and (step - n_burn) % config.thinning == 0:
            kept.append(space.unpack(v))

    if accepted_total == 0:
        raise RuntimeError("chain accepted no proposals; target looks degenerate")
    if not kept:
        kept.append(space.unpack(v))
    if len(kept) > config.pool_cap:
        pick = np.linspace(0, len(kept) - 1, config.pool_cap).astype(int)
        kept = [kept[i] for i in pick]

    n_post = config.steps - n_burn
    meta = {
        "accept_rate": accepted_post / max(n_post, 1),
        "scale_factor": factor,
        "scales": factor * scales,
        "space": space,
        "seed": seed,
    }
    return SamplePool(kept, meta=meta)
