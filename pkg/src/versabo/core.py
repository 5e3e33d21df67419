"""Core value types and the three-operation model contract.

Everything downstream is written against four small pieces: seeded
deterministic randomness (``derive_seed`` and friends), observations and
datasets, a posterior handle (sample pool or parametric), and the
``Model`` interface with its ``infer`` / ``post`` / ``gen`` operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np
from scipy.special import ndtri

__all__ = [
    "MASK64",
    "derive_seed",
    "derive_seed_array",
    "seed_uniform",
    "seed_normal",
    "seed_randint",
    "Observation",
    "Dataset",
    "EmptyDatasetError",
    "SamplePool",
    "ParametricPosterior",
    "Model",
    "objective_of",
    "f_min",
    "dataset_append",
    "as_input",
]

MASK64 = (1 << 64) - 1

# splitmix64 finalizer constants
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15

# stream salts for the single-seed draw helpers
_U_SALT = 0x7F4A7C15F39CC060
_I_SALT = 0x2545F4914F6CDD1D


def _mix64(z: int) -> int:
    """64-bit splitmix finalizer; avalanche mixing of one word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, labels=()) -> int:
    """Derive a child seed from ``master`` and a sequence of integer labels.

    Deterministic and collision-resistant: the same (master, labels) pair
    always produces the same 64-bit seed, and distinct label paths produce
    unrelated streams.  Composes: deriving [a, b] from ``master`` equals
    deriving [b] from the seed derived with [a].
    """
    h = _mix64(master)
    for lab in labels:
        h = _mix64((h + _GOLDEN) ^ _mix64(int(lab) & MASK64))
    return h


def derive_seed_array(master: int, labels: np.ndarray) -> np.ndarray:
    """Vectorized ``derive_seed(master, [lab])`` for an array of single labels.

    Bitwise-identical to the scalar version with one label.
    """
    h0 = np.uint64(_mix64(master))
    z = labels.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
        z = (h0 + np.uint64(_GOLDEN)) ^ z
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return z


def seed_uniform(seed: int) -> float:
    """Map a seed to one uniform draw in the open interval (0, 1)."""
    return ((_mix64(seed ^ _U_SALT) >> 11) + 0.5) * (2.0**-53)


def seed_normal(seed: int) -> float:
    """Map a seed to one standard-normal draw (inverse-CDF of the uniform)."""
    return float(ndtri(seed_uniform(seed)))


def seed_randint(seed: int, n: int) -> int:
    """Map a seed to one integer in [0, n)."""
    return _mix64(seed ^ _I_SALT) % n


def as_input(x) -> np.ndarray:
    """Coerce a query point to a finite 1-d float array."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"input must be a 1-d coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("input coordinates must be finite")
    return arr


@dataclass(slots=True)
class Observation:
    """One system output: an objective value plus optional named extras.

    ``aux`` carries system-specific fields such as a state label, a task
    index, or a contamination marker.  Treated as an immutable value.
    """

    objective: float
    aux: Mapping[str, Any] | None = None

    def get(self, key: str, default=None):
        if self.aux is None:
            return default
        return self.aux.get(key, default)


def objective_of(y: Observation) -> float:
    """Objective value carried by an observation; extra fields are ignored."""
    return y.objective


class EmptyDatasetError(ValueError):
    """Raised when an operation needs at least one observed pair."""


class Dataset:
    """Ordered, append-only collection of (input, observation) pairs.

    ``append`` returns a new dataset and never mutates the receiver, so
    handles onto earlier datasets stay valid.  All inputs share one
    dimension.
    """

    __slots__ = ("pairs", "_X", "_y")

    def __init__(self, pairs=()):
        self.pairs: tuple = tuple(pairs)
        self._X = None
        self._y = None

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def dim(self) -> int | None:
        """Input dimension, or None while the dataset is empty."""
        if not self.pairs:
            return None
        return len(self.pairs[0][0])

    def append(self, x, y: Observation) -> "Dataset":
        x = as_input(x)
        if self.pairs and len(x) != self.dim:
            raise ValueError(f"input dimension {len(x)} does not match dataset dimension {self.dim}")
        return Dataset(self.pairs + ((x, y),))

    def inputs(self) -> np.ndarray:
        """All inputs as an (n, d) array (cached)."""
        if self._X is None:
            if not self.pairs:
                raise EmptyDatasetError("dataset has no pairs")
            self._X = np.array([p[0] for p in self.pairs], dtype=float)
        return self._X

    def objectives(self) -> np.ndarray:
        """All objective values as an (n,) array (cached)."""
        if self._y is None:
            if not self.pairs:
                raise EmptyDatasetError("dataset has no pairs")
            self._y = np.array([p[1].objective for p in self.pairs], dtype=float)
        return self._y

    def aux_column(self, key: str, default=None) -> list:
        return [p[1].get(key, default) for p in self.pairs]


def dataset_append(data: Dataset, x, y: Observation) -> Dataset:
    """Value-semantics append; the original dataset is left unchanged."""
    return data.append(x, y)


def f_min(data: Dataset) -> float:
    """Minimum objective value observed so far.

    Raises ``EmptyDatasetError`` on an empty dataset: the optimization loop
    must seed initial data before acquisition values are meaningful.
    """
    if len(data) == 0:
        raise EmptyDatasetError("f_min of an empty dataset; seed initial observations first")
    return float(data.objectives().min())


class SamplePool:
    """Posterior represented by a finite pool of latent samples (MCMC case).

    ``post`` draws uniformly from the pool keyed by the seed.  The pool is
    immutable after construction; ``cache`` holds derived per-sample
    structures (e.g. factorizations) keyed by pool index.
    """

    __slots__ = ("samples", "cache", "meta")

    def __init__(self, samples, meta: dict | None = None):
        if not samples:
            raise ValueError("sample pool must be non-empty")
        self.samples = tuple(samples)
        self.cache: dict = {}
        self.meta = meta or {}

    def __len__(self) -> int:
        return len(self.samples)

    def select(self, seed: int) -> int:
        """Pool index selected by a seed (uniform, deterministic)."""
        return seed_randint(seed, len(self.samples))


@dataclass(slots=True)
class ParametricPosterior:
    """Posterior represented by named distribution parameters (exact/VI case).

    ``draw(params, seed)`` produces one latent sample deterministically.
    """

    params: dict
    draw: Callable[[dict, int], dict]


PosteriorHandle = SamplePool | ParametricPosterior


class Model:
    """The three-operation probabilistic-model contract.

    ``infer`` consumes a dataset and returns an opaque posterior handle;
    ``post`` maps (handle, seed) to one latent sample; ``gen`` maps
    (input, latent sample, seed) to one observation.  ``post`` and ``gen``
    must be pure functions of their arguments, including the seed, and must
    never mutate the handle or the dataset.
    """

    def infer(self, data: Dataset) -> PosteriorHandle:
        raise NotImplementedError

    def post(self, handle: PosteriorHandle, seed: int) -> dict:
        if isinstance(handle, ParametricPosterior):
            return handle.draw(handle.params, seed)
        idx = handle.select(seed)
        return self._enrich(handle, idx)

    def gen(self, x, z: dict, seed: int) -> Observation:
        raise NotImplementedError

    # Pool-based models override to attach cached per-sample structures.
    def _enrich(self, handle: SamplePool, idx: int) -> dict:
        return handle.samples[idx]
