"""Model construction by string id.

Plain ids name one zoo model; "bpoe:<a>+<b>" composes any two of them
into a product-of-experts ensemble.
"""

from __future__ import annotations

from ..ensemble import BpoeModel
from .basin import BasinModel
from .denoising import DenoisingGpModel
from .gp import GpModel
from .mh import MhConfig
from .phaseshift import PhaseShiftModel
from .switching import SwitchingModel
from .toy import GaussianToyModel
from .warp import WarpModel

__all__ = ["make_model", "list_models", "MODEL_IDS"]

MODEL_IDS = (
    "gp",
    "switching",
    "denoising_gp",
    "basin",
    "warp",
    "phaseshift",
    "gaussian_toy",
)


def list_models() -> list[str]:
    return list(MODEL_IDS) + ["bpoe:<idA>+<idB>"]


def make_model(model_id: str, box, mh: MhConfig | None = None, seed: int = 0,
               combine_rule: str = "standard", **options):
    """Build a model instance for the given id, bound to a search box."""
    if model_id.startswith("bpoe:"):
        inner = model_id[len("bpoe:"):]
        parts = inner.split("+")
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"bpoe id must look like 'bpoe:<idA>+<idB>', got {model_id!r}")
        m1 = make_model(parts[0], box, mh=mh, seed=seed * 2 + 1, **options)
        m2 = make_model(parts[1], box, mh=mh, seed=seed * 2 + 2, **options)
        return BpoeModel(m1, m2, rule=combine_rule)
    if model_id == "gp":
        return GpModel(box, mh=mh, seed=seed)
    if model_id == "switching":
        return SwitchingModel(box, mh=mh, seed=seed)
    if model_id == "denoising_gp":
        return DenoisingGpModel(box, mh=mh, seed=seed)
    if model_id == "basin":
        return BasinModel(box, mh=mh, seed=seed)
    if model_id == "warp":
        return WarpModel(box, mh=mh, seed=seed, **options)
    if model_id == "phaseshift":
        return PhaseShiftModel(box, mh=mh, seed=seed, **options)
    if model_id == "gaussian_toy":
        return GaussianToyModel(**options)
    raise ValueError(f"unknown model id {model_id!r}")
