"""Data drift detectors: batch tests and distances, plus streaming incremental KS."""

from driftkit.data_drift.base import BaseDataDrift, ComparisonResult, ReferenceSet
from driftkit.data_drift.callbacks import PermutationTestCallback
from driftkit.data_drift.distances import (
    EMD,
    MMD,
    PSI,
    BhattacharyyaDistance,
    HellingerDistance,
    HistogramIntersection,
    JSDivergence,
    KLDivergence,
)
from driftkit.data_drift.incremental_ks import IncrementalKS
from driftkit.data_drift.marginals import MultivariateMarginals
from driftkit.data_drift.statistical_tests import (
    AndersonDarlingTest,
    ChiSquareTest,
    CVMTest,
    KSTest,
    MannWhitneyUTest,
    WelchTTest,
)

__all__ = [
    "AndersonDarlingTest",
    "BaseDataDrift",
    "BhattacharyyaDistance",
    "ChiSquareTest",
    "ComparisonResult",
    "CVMTest",
    "EMD",
    "HellingerDistance",
    "HistogramIntersection",
    "IncrementalKS",
    "JSDivergence",
    "KLDivergence",
    "KSTest",
    "MannWhitneyUTest",
    "MMD",
    "MultivariateMarginals",
    "PermutationTestCallback",
    "PSI",
    "ReferenceSet",
    "WelchTTest",
]
