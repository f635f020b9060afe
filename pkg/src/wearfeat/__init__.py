"""Short-time feature extraction and cohort statistics for wearable biosignals."""

from .errors import (
    ConfigError,
    DegenerateSeriesError,
    IngestError,
    InvalidWindowError,
    WearfeatError,
)
from .linear import BandPowers, band_powers, hrv_periodogram, lomb_scargle, short_time_energy
from .nonlinear import MFDProfile, higuchi_fd, mfd_profile, mfd_summaries, poincare, sample_entropy
from .preprocess import clean_rr
from .stats import (
    TestResult,
    benjamini_hochberg,
    boxplot_stats,
    mann_whitney_u,
    run_comparisons,
)
from .types import (
    FEATURE_NAMES,
    FeatureRecord,
    FeatureStat,
    InvalidWindow,
    MotionWindow,
    RRSeries,
    SleepSchedule,
    StepRecord,
    SubjectSummary,
    validate_rr_window,
)

__version__ = "0.1.0"

__all__ = [
    "BandPowers",
    "ConfigError",
    "DegenerateSeriesError",
    "FEATURE_NAMES",
    "FeatureRecord",
    "FeatureStat",
    "IngestError",
    "InvalidWindow",
    "InvalidWindowError",
    "MFDProfile",
    "MotionWindow",
    "RRSeries",
    "SleepSchedule",
    "StepRecord",
    "SubjectSummary",
    "TestResult",
    "WearfeatError",
    "band_powers",
    "benjamini_hochberg",
    "boxplot_stats",
    "clean_rr",
    "higuchi_fd",
    "hrv_periodogram",
    "lomb_scargle",
    "mann_whitney_u",
    "mfd_profile",
    "mfd_summaries",
    "poincare",
    "run_comparisons",
    "sample_entropy",
    "short_time_energy",
    "validate_rr_window",
    "__version__",
]
