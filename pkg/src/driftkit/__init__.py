"""Concept and data drift detection with a scikit-learn style API.

Streaming concept drift detectors live in ``driftkit.concept_drift``, batch
and streaming data drift detectors in ``driftkit.data_drift``. All of them
share the callback and state machinery of ``driftkit.core``.
"""

from driftkit.concept_drift import (
    ADWIN,
    BOCD,
    CUSUM,
    DDM,
    ECDD,
    EDDM,
    GMA,
    HDDM_A,
    HDDM_W,
    KSWIN,
    RDDM,
    STEPD,
    PageHinkley,
)
from driftkit.core import (
    Callback,
    CallbackError,
    DetectionStatus,
    HistoryCallback,
    NotFittedError,
    PrequentialError,
    WindowedPrequentialError,
)
from driftkit.data_drift import (
    EMD,
    MMD,
    PSI,
    AndersonDarlingTest,
    BhattacharyyaDistance,
    ChiSquareTest,
    ComparisonResult,
    CVMTest,
    HellingerDistance,
    HistogramIntersection,
    IncrementalKS,
    JSDivergence,
    KLDivergence,
    KSTest,
    MannWhitneyUTest,
    MultivariateMarginals,
    PermutationTestCallback,
    WelchTTest,
)
from driftkit.registry import create

__version__ = "0.1.0"

__all__ = [
    "ADWIN", "BOCD", "CUSUM", "DDM", "ECDD", "EDDM", "GMA", "HDDM_A", "HDDM_W",
    "KSWIN", "PageHinkley", "RDDM", "STEPD",
    "AndersonDarlingTest", "BhattacharyyaDistance", "ChiSquareTest", "CVMTest", "EMD",
    "HellingerDistance", "HistogramIntersection", "IncrementalKS", "JSDivergence",
    "KLDivergence", "KSTest", "MannWhitneyUTest", "MMD", "MultivariateMarginals",
    "PSI", "WelchTTest",
    "Callback", "CallbackError", "ComparisonResult", "DetectionStatus", "HistoryCallback",
    "NotFittedError", "PermutationTestCallback", "PrequentialError",
    "WindowedPrequentialError", "create",
]
