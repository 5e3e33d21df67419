"""Bayesian optimization driven by three generic model operations.

Any probabilistic model exposing ``infer`` (fit a posterior), ``post``
(draw one latent sample by seed) and ``gen`` (draw one observation given
input, latent sample, and seed) can be dropped into the optimization
loop.  Acquisition functions are Monte Carlo estimates built purely from
``post`` and ``gen``; a bootstrap-gated multi-fidelity mode cuts their
cost; a product-of-experts combiner ensembles two models; a benchmark
harness reproduces the synthetic studies at desk scale.
"""

from .acquisition import (
    AcqEvalRecord,
    AcquisitionKind,
    EmpiricalQuantile,
    Parametric,
    acq_ei,
    acq_pi,
    acq_ts,
    acq_ucb,
    lambda_reduce,
    lcb_empirical_quantile,
    lcb_parametric,
)
from .core import (
    Dataset,
    EmptyDatasetError,
    Model,
    Observation,
    ParametricPosterior,
    SamplePool,
    dataset_append,
    derive_seed,
    f_min,
    objective_of,
    seed_normal,
    seed_uniform,
)
from .ensemble import BpoeModel, combine, ensemble_gen, pair_mean, pair_weight
from .loop import BoRunError, RunConfig, RunTrace, best_so_far, run_bo
from .models import (
    BasinModel,
    DenoisingGpModel,
    GaussianToyModel,
    GpModel,
    MhConfig,
    PhaseShiftModel,
    SwitchingModel,
    WarpModel,
    basin_R,
    gp_predict,
    list_models,
    logistic_step,
    make_model,
    mh_infer,
)
from .optimize import (
    AcqMinState,
    FidelitySchedule,
    SearchBox,
    acq_mf,
    lcb_bootstrap,
    mf_eval,
    optimize_acq,
)
from .systems import (
    BasinSystem,
    ContaminatedSystem,
    MultiTaskSystem,
    StateSystem,
    Steps1DSystem,
    list_systems,
    make_system,
)

__version__ = "0.1.0"
