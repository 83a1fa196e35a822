"""Error-rate detectors: DDM, EDDM and RDDM.

All three consume a binary stream where 1 marks a misclassification.
"""

from __future__ import annotations

import math
from collections import deque

from driftkit.concept_drift.base import BaseConceptDrift, ddm_signal
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.validation import check_interval, check_positive_int


class DDM(BaseConceptDrift):
    """Drift Detection Method (Gama et al., 2004).

    Tracks the error rate ``p`` and its standard deviation
    ``s = sqrt(p (1 - p) / n)``, remembers the minimum of ``p + s`` and
    signals a warning when ``p + s >= p_min + warning_level * s_min`` and a
    drift when ``p + s >= p_min + drift_level * s_min``.

    Parameters
    ----------
    warning_level : float, default=2.0
    drift_level : float, default=3.0
    min_num_instances : int, default=30
        No minimum is recorded and nothing is signalled before this many
        samples; the error rate is accumulated from the first one.
    callbacks : list of Callback, optional
    """

    _binary_input = True

    def __init__(self, warning_level=2.0, drift_level=3.0, min_num_instances=30, callbacks=None):
        self.warning_level = warning_level
        self.drift_level = drift_level
        self.min_num_instances = min_num_instances
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("warning_level", self.warning_level, 0.0, math.inf)
        check_interval("drift_level", self.drift_level, 0.0, math.inf)
        if self.drift_level <= self.warning_level:
            raise ValueError("drift_level must exceed warning_level")
        check_positive_int("min_num_instances", self.min_num_instances)

    def _reset_stats(self):
        self.n_ = 0
        self.error_rate_ = 0.0
        self.error_std_ = 0.0
        self.p_min_ = math.inf
        self.s_min_ = math.inf

    def _step(self, error):
        self.n_ += 1
        self.error_rate_ += (error - self.error_rate_) / self.n_
        p = self.error_rate_
        self.error_std_ = math.sqrt(p * (1.0 - p) / self.n_)
        if self.n_ < self.min_num_instances:
            return NO_SIGNAL
        level = p + self.error_std_
        if level < self.p_min_ + self.s_min_:
            self.p_min_ = p
            self.s_min_ = self.error_std_
        return ddm_signal(level, self.p_min_, self.s_min_, self.warning_level, self.drift_level)

    def summary(self):
        if not hasattr(self, "n_"):
            return {}
        return {"n": self.n_, "error_rate": self.error_rate_, "error_std": self.error_std_}


class EDDM(BaseConceptDrift):
    """Early Drift Detection Method (Baena-García et al., 2006).

    Monitors the distance (in samples) between consecutive errors. With
    ``m`` and ``s`` the running mean and standard deviation of those
    distances, the ratio ``(m + 2s) / max(m + 2s)`` below ``warning_level``
    is a warning and below ``drift_level`` a drift.

    The maximum is recorded, and signals allowed, only once
    ``min_num_errors`` errors have been observed.
    """

    _binary_input = True

    def __init__(self, warning_level=0.95, drift_level=0.9, min_num_errors=30, callbacks=None):
        self.warning_level = warning_level
        self.drift_level = drift_level
        self.min_num_errors = min_num_errors
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("warning_level", self.warning_level, 0.0, 1.0, high_open=False)
        check_interval("drift_level", self.drift_level, 0.0, 1.0, high_open=False)
        if self.drift_level >= self.warning_level:
            raise ValueError("drift_level must be below warning_level")
        check_positive_int("min_num_errors", self.min_num_errors)

    def _reset_stats(self):
        self.n_ = 0
        self.num_errors_ = 0
        self.last_error_ = 0
        self.distance_mean_ = 0.0
        self.distance_m2_ = 0.0
        self.max_level_ = -math.inf

    def _step(self, error):
        self.n_ += 1
        if not error:
            return NO_SIGNAL
        self.num_errors_ += 1
        distance = self.n_ - self.last_error_
        self.last_error_ = self.n_
        delta = distance - self.distance_mean_
        self.distance_mean_ += delta / self.num_errors_
        self.distance_m2_ += delta * (distance - self.distance_mean_)
        std = math.sqrt(self.distance_m2_ / self.num_errors_)
        level = self.distance_mean_ + 2.0 * std
        if self.num_errors_ < self.min_num_errors:
            return NO_SIGNAL
        if level > self.max_level_:
            self.max_level_ = level
            return NO_SIGNAL
        ratio = level / self.max_level_
        if ratio < self.drift_level:
            return DetectionStatus(drift=True)
        if ratio < self.warning_level:
            return DetectionStatus(warning=True)
        return NO_SIGNAL

    def summary(self):
        if not hasattr(self, "n_"):
            return {}
        return {
            "n": self.n_,
            "num_errors": self.num_errors_,
            "distance_mean": self.distance_mean_,
            "max_level": self.max_level_,
        }


class RDDM(BaseConceptDrift):
    """Reactive Drift Detection Method (Barros et al., 2017).

    DDM's rule plus two reactions to long stable concepts:

    * once a concept exceeds ``max_concept_size`` samples (outside a warning)
      the statistics are recomputed from the last ``min_stable_concept_size``
      predictions, so they stay sensitive;
    * a warning lasting ``warning_limit`` samples is promoted to a drift.

    After a drift the statistics are rebuilt from the predictions stored
    since the warning began.

    Defaults are those of the original publication: warning level 1.773,
    drift level 2.258, 129 minimum instances, 40 000 maximum concept size,
    7 000 stable concept size and a warning limit of 1 400.
    """

    _binary_input = True

    def __init__(
        self,
        warning_level=1.773,
        drift_level=2.258,
        min_num_instances=129,
        max_concept_size=40_000,
        min_stable_concept_size=7_000,
        warning_limit=1_400,
        callbacks=None,
    ):
        self.warning_level = warning_level
        self.drift_level = drift_level
        self.min_num_instances = min_num_instances
        self.max_concept_size = max_concept_size
        self.min_stable_concept_size = min_stable_concept_size
        self.warning_limit = warning_limit
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("warning_level", self.warning_level, 0.0, math.inf)
        check_interval("drift_level", self.drift_level, 0.0, math.inf)
        if self.drift_level <= self.warning_level:
            raise ValueError("drift_level must exceed warning_level")
        check_positive_int("min_num_instances", self.min_num_instances)
        check_positive_int("max_concept_size", self.max_concept_size)
        check_positive_int("min_stable_concept_size", self.min_stable_concept_size)
        check_positive_int("warning_limit", self.warning_limit)
        if self.min_stable_concept_size > self.max_concept_size:
            raise ValueError("min_stable_concept_size must not exceed max_concept_size")

    def _ensure_state(self):
        if not hasattr(self, "step_"):
            self.stored_ = deque(maxlen=self.min_stable_concept_size)
            self.rebuild_ = None
        super()._ensure_state()

    def _reset_stats(self):
        self.n_ = 0
        self.error_rate_ = 0.0
        self.error_std_ = 0.0
        self.p_min_ = math.inf
        self.s_min_ = math.inf
        self.concept_size_ = 0
        self.warning_run_ = 0

    def _restart_after_drift(self):
        # handled by the rebuild scheduled in _step
        pass

    def _absorb(self, error):
        self.n_ += 1
        self.concept_size_ += 1
        self.error_rate_ += (error - self.error_rate_) / self.n_
        p = self.error_rate_
        self.error_std_ = math.sqrt(p * (1.0 - p) / self.n_)
        if self.n_ < self.min_num_instances:
            return None
        level = p + self.error_std_
        if level < self.p_min_ + self.s_min_:
            self.p_min_ = p
            self.s_min_ = self.error_std_
        return level

    def _rebuild(self, predictions):
        self._reset_stats()
        for error in predictions:
            self._absorb(error)

    def _step(self, error):
        if self.rebuild_ is not None:
            _, count = self.rebuild_
            history = list(self.stored_)
            self._rebuild(history[len(history) - count:])
            self.rebuild_ = None
        self.stored_.append(error)
        level = self._absorb(error)
        if level is None:
            return NO_SIGNAL
        status = ddm_signal(level, self.p_min_, self.s_min_, self.warning_level, self.drift_level)
        if status.drift:
            # restart from the predictions since the warning began, drift sample included
            self.rebuild_ = ("drift", min(self.warning_run_ + 1, len(self.stored_)))
            return status
        if status.warning:
            self.warning_run_ += 1
            if self.warning_run_ >= self.warning_limit:
                self.rebuild_ = ("drift", 1)
                return DetectionStatus(drift=True)
            return status
        self.warning_run_ = 0
        if self.concept_size_ >= self.max_concept_size:
            self.rebuild_ = ("cap", len(self.stored_))
        return status

    def summary(self):
        if not hasattr(self, "n_"):
            return {}
        return {"n": self.n_, "error_rate": self.error_rate_, "concept_size": self.concept_size_}
