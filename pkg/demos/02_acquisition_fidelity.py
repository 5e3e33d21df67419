"""Monte Carlo acquisition functions and the effect of fidelity M.

All four acquisition strategies (EI, PI, UCB-as-LCB, TS) are computed
from M posterior-predictive draws.  Low M gives a cheap, noisy score;
high M a stable one.  This script tabulates each acquisition along a
1-d slice at two fidelities so the noise difference is visible.
"""

import numpy as np

from versabo import (
    Dataset,
    EmpiricalQuantile,
    GpModel,
    MhConfig,
    Observation,
    SearchBox,
    acq_ei,
    acq_pi,
    acq_ts,
    acq_ucb,
    derive_seed,
    f_min,
)

rng = np.random.default_rng(3)
box = SearchBox.cube(0.0, 3.0, 1)
data = Dataset()
for i in range(10):
    x = box.sample(rng, 1)[0]
    y = float((x[0] - 1.9) ** 2 + 0.1 * rng.standard_normal())
    data = data.append(x, Observation(y))

model = GpModel(box, mh=MhConfig(steps=1500), seed=2)
handle = model.infer(data)
post = lambda s: model.post(handle, s)
fmin = f_min(data)
iteration_seed = derive_seed(5, (1,))

grid = np.linspace(0.0, 3.0, 7)
print(f"f_min = {fmin:+.3f}   (EI and PI values shown per draw, i.e. divided by M)")
print(f"{'x':>5} | {'EI M=50':>9} {'EI M=500':>9} | {'PI M=50':>8} {'PI M=500':>8} "
      f"| {'LCB M=500':>9} | {'TS M=500':>9}")
for j, xv in enumerate(grid):
    x = np.array([xv])
    row = []
    for M in (50, 500):
        rec = acq_ei(x, post, model.gen, fmin, M, derive_seed(7, (j, M)))
        row.append(rec.value / M)
    for M in (50, 500):
        rec = acq_pi(x, post, model.gen, fmin, M, derive_seed(8, (j, M)))
        row.append(rec.value / M)
    lcb = acq_ucb(x, post, model.gen, EmpiricalQuantile(b=51.0), 500,
                  derive_seed(9, (j,))).value
    ts = acq_ts(x, post, model.gen, 500, derive_seed(10, (j,)), iteration_seed).value / 500
    print(f"{xv:5.2f} | {row[0]:9.4f} {row[1]:9.4f} | {row[2]:8.3f} {row[3]:8.3f} "
          f"| {lcb:9.3f} | {ts:9.3f}")

print("\nEI/PI are improvement scores (bigger is better; the optimizer minimizes")
print("their negation); the LCB and TS columns are minimized directly.")
print("The minimum of the parabola sits at x = 1.9.")
