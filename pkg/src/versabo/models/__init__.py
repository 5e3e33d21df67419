from .basin import BasinModel, basin_R
from .denoising import DenoisingGpModel
from .gp import GpModel, gp_predict
from .mh import MhConfig, mh_infer
from .phaseshift import PhaseShiftModel, logistic_step
from .registry import MODEL_IDS, list_models, make_model
from .switching import SwitchingModel, poly_features
from .toy import GaussianToyModel
from .warp import WarpModel

__all__ = [
    "BasinModel",
    "basin_R",
    "DenoisingGpModel",
    "GpModel",
    "gp_predict",
    "MhConfig",
    "mh_infer",
    "PhaseShiftModel",
    "logistic_step",
    "MODEL_IDS",
    "list_models",
    "make_model",
    "SwitchingModel",
    "poly_features",
    "GaussianToyModel",
    "WarpModel",
]
