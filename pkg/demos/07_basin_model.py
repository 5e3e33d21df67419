"""Prior structure on the objective: the basin model.

When the landscape is a steep V (under- to over-fitting sweeps behave
like this), a two-sided ReLU regression with an explicit inflection
point can localize the minimum from very few points, while a stationary
GP keeps smoothing over the kink.
"""

import numpy as np

from versabo import AcquisitionKind, MhConfig, RunConfig, make_model, make_system, run_bo

system = make_system("basin")
print(f"true minimum {system.known_minimum:+.2f} at {np.round(system.mu, 2).tolist()}\n")

trials, N = 3, 30
target = system.known_minimum + 0.1
for model_id, steps in (("basin", 8000), ("gp", 2000)):
    reach, finals = [], []
    for trial in range(trials):
        model = make_model(model_id, system.box, mh=MhConfig(steps=steps), seed=60 + trial)
        config = RunConfig(N=N, acq=AcquisitionKind("ei", 100), seed=70 + trial, budget=100)
        _, trace = run_bo(config, system, model)
        hit = next((r.iteration for r in trace if r.best_f <= target), N + 1)
        reach.append(hit)
        finals.append(trace.records[-1].best_f)
    print(f"{model_id:>6}: reach-within-0.1 iterations {reach} "
          f"(median {np.median(reach)}); final best {[round(v, 3) for v in finals]}")

# where does the basin model think the inflection point is?
from versabo import Dataset, derive_seed

rng = np.random.default_rng(4)
data = Dataset()
for i in range(25):
    x = system.box.sample(rng, 1)[0]
    data = data.append(x, system.evaluate(x, derive_seed(5, [i])))
model = make_model("basin", system.box, seed=8)
handle = model.infer(data)
mus = np.array([s["mu"] for s in handle.samples])
print(f"\nposterior inflection point from 25 random observations: "
      f"mean {mus.mean(axis=0).round(3)}, sd {mus.std(axis=0).round(3)}")
