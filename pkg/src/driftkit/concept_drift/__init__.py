"""Streaming concept drift detectors.

Each detector consumes one value per ``update`` (a binary error indicator or
a real-valued metric, depending on the method) and returns a
``DetectionStatus``.
"""

from driftkit.concept_drift.adwin import ADWIN
from driftkit.concept_drift.base import BaseConceptDrift, StreamStats
from driftkit.concept_drift.bocd import BOCD
from driftkit.concept_drift.control_charts import CUSUM, GMA, PageHinkley
from driftkit.concept_drift.ddm import DDM, EDDM, RDDM
from driftkit.concept_drift.ecdd import ECDD
from driftkit.concept_drift.hddm import HDDM_A, HDDM_W
from driftkit.concept_drift.windows import KSWIN, STEPD

__all__ = [
    "ADWIN",
    "BOCD",
    "BaseConceptDrift",
    "CUSUM",
    "DDM",
    "ECDD",
    "EDDM",
    "GMA",
    "HDDM_A",
    "HDDM_W",
    "KSWIN",
    "PageHinkley",
    "RDDM",
    "STEPD",
    "StreamStats",
]
