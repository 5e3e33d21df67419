"""The three model operations: infer, post, gen.

Every model in this library is driven through the same three calls:
``infer(dataset)`` fits a posterior and returns an opaque handle,
``post(handle, seed)`` draws one latent sample, and ``gen(x, z, seed)``
draws one observation from the generative distribution at x.  Both draw
operations are deterministic in their seed, which makes whole
optimization runs reproducible bit for bit.
"""

import numpy as np

from versabo import Dataset, GpModel, MhConfig, Observation, SearchBox, derive_seed

rng = np.random.default_rng(0)
box = SearchBox.cube(-2.0, 2.0, 1)

# a few observations of a noisy sine
data = Dataset()
for i in range(8):
    x = box.sample(rng, 1)[0]
    y = float(np.sin(2.0 * x[0]) + 0.05 * rng.standard_normal())
    data = data.append(x, Observation(y))

model = GpModel(box, mh=MhConfig(steps=1500), seed=1)
handle = model.infer(data)
print(f"infer -> posterior handle with a pool of {len(handle)} hyperparameter samples")

# post and gen are pure functions of (handle, seed) and (x, z, seed)
z = model.post(handle, seed=42)
z_again = model.post(handle, seed=42)
print("post(handle, 42) twice -> identical latent:",
      all(np.array_equal(z[k], z_again[k]) for k in ("log_ell", "log_sf2", "m0")))

x_query = np.array([0.5])
y1 = model.gen(x_query, z, seed=7)
y2 = model.gen(x_query, z, seed=7)
y3 = model.gen(x_query, z, seed=8)
print(f"gen at x=0.5 with seed 7, twice: {y1.objective:.6f}, {y2.objective:.6f}")
print(f"gen at x=0.5 with seed 8:        {y3.objective:.6f}  (new seed, new draw)")

# seeds for parallel streams come from a label-based derivation
seeds = [derive_seed(123, (m,)) for m in range(1, 4)]
print("derived seed streams from master 123:", seeds)

# the predictive distribution at a point, by simple Monte Carlo
draws = [model.gen(x_query, model.post(handle, s), s).objective
         for s in (derive_seed(9, (m,)) for m in range(1, 2001))]
print(f"posterior predictive at 0.5: mean {np.mean(draws):+.3f}, "
      f"sd {np.std(draws):.3f} (truth sin(1) = {np.sin(1.0):+.3f})")
