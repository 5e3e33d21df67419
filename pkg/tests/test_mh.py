import numpy as np
import pytest

from versabo.core import Dataset, derive_seed
from versabo.models import (
    BasinModel,
    DenoisingGpModel,
    GpModel,
    MhConfig,
    PhaseShiftModel,
    SwitchingModel,
    WarpModel,
    mh_infer,
)
from versabo.systems import (
    BasinSystem,
    ContaminatedSystem,
    MultiTaskSystem,
    StateSystem,
    Steps1DSystem,
)


def _std_normal_target(z):
    return -0.5 * z["x"] ** 2


class TestEngine:
    def test_standard_normal_moments(self):
        # analytic target moments: mean 0, std 1
        pool = mh_infer(_std_normal_target, {"x": 0.0}, MhConfig(), seed=7)
        xs = np.array([s["x"] for s in pool.samples])
        assert abs(xs.mean()) < 0.1
        assert abs(xs.std() - 1.0) < 0.15

    def test_identical_seed_identical_pool(self):
        p1 = mh_infer(_std_normal_target, {"x": 0.0}, MhConfig(steps=1200), seed=5)
        p2 = mh_infer(_std_normal_target, {"x": 0.0}, MhConfig(steps=1200), seed=5)
        assert all(a["x"] == b["x"] for a, b in zip(p1.samples, p2.samples))

    def test_symmetric_proposals_with_flat_target_always_accept(self):
        pool = mh_infer(lambda z: 0.0, {"x": 0.0}, MhConfig(steps=600), seed=1)
        assert pool.meta["accept_rate"] == 1.0

    def test_vector_parameters(self):
        target = lambda z: -0.5 * float(np.sum(z["v"] ** 2)) - 0.5 * z["s"] ** 2
        pool = mh_infer(target, {"v": np.zeros(3), "s": 0.0}, MhConfig(steps=2000), seed=2)
        assert pool.samples[0]["v"].shape == (3,)

    def test_non_finite_init_errors(self):
        with pytest.raises(ValueError):
            mh_infer(lambda z: np.inf if z["x"] != 0 else -np.inf, {"x": 0.0},
                     MhConfig(steps=100), seed=0)

    def test_degenerate_target_errors(self):
        # only the exact initial point has positive density
        target = lambda z: 0.0 if z["x"] == 0.0 else -np.inf
        with pytest.raises(RuntimeError):
            mh_infer(target, {"x": 0.0}, MhConfig(steps=200), seed=0)

    def test_pool_cap(self):
        pool = mh_infer(_std_normal_target, {"x": 0.0},
                        MhConfig(steps=5000, thinning=1, pool_cap=100), seed=3)
        assert len(pool) == 100

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MhConfig(steps=0)
        with pytest.raises(ValueError):
            MhConfig(burn_fraction=1.0)


class TestAcceptanceRates:
    """Post-adaptation acceptance stays within [0.1, 0.5] on every shipped
    model's target at that model's default configuration."""

    def test_all_zoo_targets(self):
        rng = np.random.default_rng(3)
        cases = []

        sys_c = ContaminatedSystem(d=2, p=0.0)
        data = Dataset()
        for i in range(25):
            x = sys_c.box.sample(rng, 1)[0]
            data = data.append(x, sys_c.evaluate(x, derive_seed(30, [i])))
        cases.append(("gp", GpModel(sys_c.box, seed=4), data))

        sys_b = BasinSystem()
        data = Dataset()
        for i in range(20):
            x = sys_b.box.sample(rng, 1)[0]
            data = data.append(x, sys_b.evaluate(x, derive_seed(10, [i])))
        cases.append(("basin", BasinModel(sys_b.box, seed=2), data))

        sys_s = Steps1DSystem()
        data = Dataset()
        for i in range(25):
            x = sys_s.box.sample(rng, 1)[0]
            data = data.append(x, sys_s.evaluate(x, derive_seed(20, [i])))
        cases.append(("phaseshift", PhaseShiftModel(sys_s.box, K=2, seed=3), data))

        sys_st = StateSystem()
        data = Dataset()
        for i in range(30):
            x = sys_st.box.sample(rng, 1)[0]
            data = data.append(x, sys_st.evaluate(x, derive_seed(40, [i])))
        cases.append(("switching", SwitchingModel(sys_st.box, seed=5), data))

        sys_ch = ContaminatedSystem(d=2, p=0.33)
        data = Dataset()
        for i in range(30):
            x = sys_ch.box.sample(rng, 1)[0]
            data = data.append(x, sys_ch.evaluate(x, derive_seed(50, [i])))
        cases.append(("denoising", DenoisingGpModel(sys_ch.box, seed=6), data))

        sys_mt = MultiTaskSystem()
        data = Dataset()
        for i in range(16):
            t = 1 + (i % 2)
            x = sys_mt.box.sample(rng, 1)[0]
            data = data.append(x, sys_mt.evaluate(t, x, derive_seed(60, [i])))
        cases.append(("warp", WarpModel(sys_mt.box, n_tasks=2, seed=7), data))

        rates = {}
        for name, model, d in cases:
            handle = model.infer(d)
            rates[name] = handle.meta["accept_rate"]
        for name, rate in rates.items():
            assert 0.1 <= rate <= 0.5, f"{name} acceptance {rate} outside [0.1, 0.5]"
