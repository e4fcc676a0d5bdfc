"""Zero-evidence privacy disclosure metrics for biometric score sets."""
from ._backend import BACKEND
from .calibration import laplace_augment, pav_calibrate
from .metrics import (
    Prior,
    categorical_tag,
    cllr,
    d_ece_closed_form,
    d_ece_numeric,
    ece,
    eer,
    perfect_privacy_ece,
    worst_case_llr,
    zebra,
)
from .types import (
    CalibratedLLRs,
    EceProfile,
    ScoreSet,
    ZebraReport,
    validate_score_set,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CalibratedLLRs",
    "EceProfile",
    "Prior",
    "ScoreSet",
    "ZebraReport",
    "categorical_tag",
    "cllr",
    "d_ece_closed_form",
    "d_ece_numeric",
    "ece",
    "eer",
    "laplace_augment",
    "pav_calibrate",
    "perfect_privacy_ece",
    "validate_score_set",
    "worst_case_llr",
    "zebra",
]
