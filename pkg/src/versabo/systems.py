"""Synthetic benchmark systems.

Closed-form surrogates with the observation structure of the target
applications: a contaminated objective, a pass/fail system with a state
label and a sentinel value, a two-task system sharing one latent
function, a steep basin landscape, and a stepped 1-d landscape.  Every
surrogate constant lives here so results stay reproducible and
auditable.  ``clean_objective`` exposes the uncorrupted ground truth for
trace reporting only; models never see it.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .core import Observation, derive_seed, seed_normal, seed_uniform
from .models.basin import basin_R
from .optimize import SearchBox

__all__ = [
    "ContaminatedSystem",
    "StateSystem",
    "MultiTaskSystem",
    "BasinSystem",
    "Steps1DSystem",
    "make_system",
    "list_systems",
    "SYSTEM_IDS",
]

_CONTAM_PICK = 1
_CONTAM_VALUE = 2
_NOISE = 3

# state-system surface constants; the score peak sits close to the fail
# sub-box so smoothing across the sentinel cliff is costly
STATE_BASE = 0.62
STATE_BUMP1_HEIGHT = 0.20
STATE_BUMP1_CENTER = (0.38, 0.32, 0.55, 0.45)
STATE_BUMP1_WIDTH = 0.28
STATE_BUMP2_HEIGHT = 0.08
STATE_BUMP2_CENTER = (0.15, 0.20, 0.20, 0.80)
STATE_BUMP2_WIDTH = 0.25
STATE_FAIL_LO = (0.50, 0.45, 0.0, 0.0)
STATE_FAIL_HI = (1.0, 1.0, 1.0, 1.0)
STATE_SENTINEL = 0.30
STATE_NOISE_SD = 0.01

# two-task system constants
MULTITASK_ALPHA = (0.2, -0.3)
MULTITASK_BETA = (1.0, 1.6)
MULTITASK_NOISE_SD = 0.05

# basin system constants
BASIN_MU = (0.8, -0.4)
BASIN_A = (2.5, 2.0)
BASIN_B = (1.8, 2.6)
BASIN_C = -2.0
BASIN_NOISE_SD = 0.03


class ContaminatedSystem:
    """Norm-minus-cosines objective with uniform contamination.

    The clean response is |x|_2 - mean(cos(x_i)), minimized at the origin
    with value -1.  With probability p the observation is replaced by a
    uniform draw over [f_max/10, f_max], where f_max is the maximum of
    the clean response over the box (computed once by dense grid search
    plus local refinement).
    """

    maximize = False

    def __init__(self, d: int = 2, p: float = 0.33, box: SearchBox | None = None):
        if not 0.0 <= p <= 1.0:
            raise ValueError("contamination probability must lie in [0, 1]")
        self.d = int(d)
        self.p = float(p)
        self.box = box if box is not None else SearchBox.cube(-5.0, 5.0, d)
        self.f_max = _max_over_box(self._clean_rows, self.box)
        self.id = f"contaminated(d={d},p={p:g})"

    def _clean_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.linalg.norm(X, axis=1) - np.cos(X).mean(axis=1)

    def clean_objective(self, x) -> float:
        return float(self._clean_rows(np.asarray(x, dtype=float))[0])

    def evaluate(self, x, seed: int) -> Observation:
        if self.p > 0.0 and seed_uniform(derive_seed(seed, (_CONTAM_PICK,))) < self.p:
            lo, hi = self.f_max / 10.0, self.f_max
            v = lo + (hi - lo) * seed_uniform(derive_seed(seed, (_CONTAM_VALUE,)))
            return Observation(float(v), {"contaminated": 1})
        return Observation(self.clean_objective(x), {"contaminated": 0})


class StateSystem:
    """Score surface with a fail sub-box returning a fixed sentinel.

    Queries inside the fail region observe exactly the sentinel objective
    with state label 0; elsewhere the smooth score (two Gaussian bumps
    over a base level) is observed with small noise and state label 1.
    Scores are maximized: runs minimize the negation.
    """

    maximize = True

    def __init__(self):
        self.d = 4
        self.box = SearchBox.cube(0.0, 1.0, 4)
        self.id = "state"
        res = minimize(lambda x: -self._score(x), np.asarray(STATE_BUMP1_CENTER),
                       method="L-BFGS-B", bounds=[(0.0, 1.0)] * 4)
        self.max_score = float(-res.fun)

    def _score(self, x) -> float:
        x = np.asarray(x, dtype=float)
        r1 = x - np.asarray(STATE_BUMP1_CENTER)
        r2 = x - np.asarray(STATE_BUMP2_CENTER)
        return float(
            STATE_BASE
            + STATE_BUMP1_HEIGHT * np.exp(-(r1 @ r1) / (2.0 * STATE_BUMP1_WIDTH**2))
            + STATE_BUMP2_HEIGHT * np.exp(-(r2 @ r2) / (2.0 * STATE_BUMP2_WIDTH**2))
        )

    def in_fail_region(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= STATE_FAIL_LO) and np.all(x <= STATE_FAIL_HI))

    def clean_objective(self, x) -> float:
        if self.in_fail_region(x):
            return STATE_SENTINEL
        return self._score(x)

    def evaluate(self, x, seed: int) -> Observation:
        if self.in_fail_region(x):
            return Observation(STATE_SENTINEL, {"state": 0})
        y = self._score(x) + STATE_NOISE_SD * seed_normal(derive_seed(seed, (_NOISE,)))
        return Observation(float(y), {"state": 1})


class MultiTaskSystem:
    """Two tasks observing affine transforms of one shared latent function."""

    maximize = False

    def __init__(self, noise_sd: float = MULTITASK_NOISE_SD):
        self.d = 1
        self.box = SearchBox.cube(0.0, 3.0, 1)
        self.noise_sd = float(noise_sd)
        self.id = "multitask"

    def latent(self, x) -> float:
        x = float(np.atleast_1d(x)[0])
        return 0.6 * np.sin(3.0 * x) + 0.3 * x

    def evaluate(self, t: int, x, seed: int) -> Observation:
        if t not in (1, 2):
            raise ValueError(f"unknown task {t}")
        h = self.latent(x)
        y = MULTITASK_ALPHA[t - 1] + MULTITASK_BETA[t - 1] * h
        y += self.noise_sd * seed_normal(derive_seed(seed, (_NOISE, t)))
        return Observation(float(y), {"task": t})


class BasinSystem:
    """Steep two-sided ReLU landscape with a known minimum."""

    maximize = False

    def __init__(self):
        self.d = 2
        self.box = SearchBox.cube(-3.0, 3.0, 2)
        self.mu = np.asarray(BASIN_MU)
        self.a = np.asarray(BASIN_A)
        self.b = np.asarray(BASIN_B)
        self.c = BASIN_C
        self.known_minimum = BASIN_C
        self.id = "basin"

    def clean_objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return basin_R(x - self.mu, self.a, self.b) + self.c

    def evaluate(self, x, seed: int) -> Observation:
        y = self.clean_objective(x) + BASIN_NOISE_SD * seed_normal(derive_seed(seed, (_NOISE,)))
        return Observation(float(y))


class Steps1DSystem:
    """One-dimensional stepped landscape (for phase-shift and ensemble demos)."""

    maximize = False

    def __init__(self, noise_sd: float = 0.05):
        self.d = 1
        self.box = SearchBox.cube(0.0, 3.0, 1)
        self.noise_sd = float(noise_sd)
        self.id = "steps-1d"

    def clean_objective(self, x) -> float:
        x = float(np.atleast_1d(x)[0])
        return 2.0 / (1.0 + np.exp(-5.0 * (x - 1.0))) - 3.0 / (1.0 + np.exp(-5.0 * (x - 2.0)))

    def evaluate(self, x, seed: int) -> Observation:
        y = self.clean_objective(x) + self.noise_sd * seed_normal(derive_seed(seed, (_NOISE,)))
        return Observation(float(y))


def _max_over_box(rows_fn, box: SearchBox) -> float:
    """Maximum of a vectorized function over a box: dense grid, then polish.

    Uses a 101-point-per-axis grid up to three dimensions and 1e5
    deterministic random probes above that.
    """
    if box.dim <= 3:
        axes = [np.linspace(box.lo[j], box.hi[j], 101) for j in range(box.dim)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.dim)
    else:
        rng = np.random.default_rng(0)
        grid = box.sample(rng, 100_000)
    vals = rows_fn(grid)
    x0 = grid[int(np.argmax(vals))]
    res = minimize(lambda x: -float(rows_fn(x[None, :])[0]), x0, method="L-BFGS-B",
                   bounds=list(zip(box.lo, box.hi)))
    return float(max(vals.max(), -res.fun))


SYSTEM_IDS = ("clean-d2", "contam-low-d2", "contam-high-d2", "state", "basin",
              "multitask", "steps-1d")


def make_system(system_id: str):
    """Build a benchmark system by id."""
    if system_id == "clean-d2":
        return ContaminatedSystem(d=2, p=0.0)
    if system_id == "contam-low-d2":
        return ContaminatedSystem(d=2, p=0.01)
    if system_id == "contam-high-d2":
        return ContaminatedSystem(d=2, p=0.33)
    if system_id == "state":
        return StateSystem()
    if system_id == "basin":
        return BasinSystem()
    if system_id == "multitask":
        return MultiTaskSystem()
    if system_id == "steps-1d":
        return Steps1DSystem()
    raise ValueError(f"unknown system id {system_id!r}")


def list_systems() -> list[str]:
    return list(SYSTEM_IDS)
