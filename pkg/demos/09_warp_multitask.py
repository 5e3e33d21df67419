"""Structured multi-task regression with the warp model.

Two tasks observe affine transforms of one shared latent function.  The
warp model puts a GP on the latent and a per-task affine warp on top,
marginalizing the latent analytically, so a handful of points in either
task inform both.
"""

import numpy as np

from versabo import Dataset, MhConfig, WarpModel, derive_seed, make_system

system = make_system("multitask")
print("task t observes alpha_t + beta_t * h(x) + noise for a shared latent h\n")

rng = np.random.default_rng(2)
data = Dataset()
for i in range(18):
    t = 1 + (i % 2)
    x = system.box.sample(rng, 1)[0]
    data = data.append(x, system.evaluate(t, x, derive_seed(3, [i])))

model = WarpModel(system.box, n_tasks=2, mh=MhConfig(steps=4000), seed=5)
handle = model.infer(data)
print(f"inferred on {len(data)} observations across both tasks "
      f"(chain acceptance {handle.meta['accept_rate']:.2f})\n")

# cross-task prediction: the model transfers shape between tasks
print(f"{'x':>5} | {'task-1 pred':>11} {'task-1 true':>11} | {'task-2 pred':>11} {'task-2 true':>11}")
for xv in (0.4, 1.2, 2.0, 2.8):
    x = np.array([xv])
    row = []
    for t in (1, 2):
        draws = [model.gen(x, model.post(handle, derive_seed(7, (t, k))),
                           derive_seed(7, (t, k)), task=t).objective
                 for k in range(400)]
        truth = system.evaluate(t, x, 0)
        from versabo.systems import MULTITASK_ALPHA, MULTITASK_BETA

        clean = MULTITASK_ALPHA[t - 1] + MULTITASK_BETA[t - 1] * system.latent(xv)
        row += [np.mean(draws), clean]
    print(f"{xv:5.2f} | {row[0]:11.3f} {row[1]:11.3f} | {row[2]:11.3f} {row[3]:11.3f}")

w2 = np.array([s["w2"] for s in handle.samples])
ratio = w2.mean(axis=0)[1] / w2.mean(axis=0)[0]
print(f"\nper-task latent scale (w2) posterior means: {w2.mean(axis=0).round(2)}; "
      f"their ratio {ratio:.2f} recovers beta_2/beta_1 = 1.60 up to the latent gauge")
