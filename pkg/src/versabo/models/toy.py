"""Closed-form toy model with a fixed Gaussian predictive.

Used to validate acquisition estimates against analytic values: ``post``
is exact (a parametric posterior) and ``gen`` draws from a known normal
distribution, independent of the input.
"""

from __future__ import annotations

from ..core import (
    Dataset,
    Model,
    Observation,
    ParametricPosterior,
    derive_seed,
    seed_normal,
)

__all__ = ["GaussianToyModel"]

_NOISE_STREAM = 11


class GaussianToyModel(Model):
    """Predictive N(mu, sigma^2) at every input."""

    def __init__(self, mu: float = 0.0, sigma: float = 1.0):
        self.mu = float(mu)
        self.sigma = float(sigma)

    def infer(self, data: Dataset) -> ParametricPosterior:
        params = {"mu": self.mu, "sigma": self.sigma}
        return ParametricPosterior(params, lambda p, s: dict(p))

    def gen(self, x, z: dict, seed: int) -> Observation:
        y = z["mu"] + z["sigma"] * seed_normal(derive_seed(seed, (_NOISE_STREAM,)))
        return Observation(float(y))
