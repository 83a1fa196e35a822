"""Sequential control charts on a real-valued stream: CUSUM, Page-Hinkley, GMA."""

from __future__ import annotations

import math

from driftkit.concept_drift.base import BaseConceptDrift, StreamStats
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.validation import check_interval, check_positive_int


def _standardize(x, mean, std):
    if std > 0:
        return (x - mean) / std
    if x == mean:
        return 0.0
    return math.copysign(math.inf, x - mean)


class CUSUM(BaseConceptDrift):
    """Two-sided tabular CUSUM on standardized values (Page, 1954).

    The first ``min_num_instances`` values estimate the in-control mean and
    standard deviation, which are then frozen. Each later value is
    standardized to ``z`` and accumulated as
    ``g+ = max(0, g+ + z - delta)`` and ``g- = max(0, g- - z - delta)``;
    drift is signalled when ``max(g+, g-) > threshold``.

    Passing both ``mean`` and ``std`` skips the estimation phase.

    The original method leaves ``delta`` and ``threshold`` open; the defaults
    (0.005 and 50, in standard deviations) are this package's choice.
    """

    def __init__(self, delta=0.005, threshold=50.0, min_num_instances=30, mean=None, std=None,
                 callbacks=None):
        self.delta = delta
        self.threshold = threshold
        self.min_num_instances = min_num_instances
        self.mean = mean
        self.std = std
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("delta", self.delta, 0.0, math.inf, low_open=False)
        check_interval("threshold", self.threshold, 0.0, math.inf)
        check_positive_int("min_num_instances", self.min_num_instances, minimum=2)
        if (self.mean is None) != (self.std is None):
            raise ValueError("mean and std must be given together")
        if self.std is not None:
            check_interval("std", self.std, 0.0, math.inf)

    def _reset_stats(self):
        self.warmup_ = StreamStats()
        if self.mean is not None:
            self.center_, self.scale_ = float(self.mean), float(self.std)
        else:
            self.center_ = self.scale_ = None
        self.g_pos_ = 0.0
        self.g_neg_ = 0.0

    def _step(self, x):
        if self.center_ is None:
            self.warmup_.update(x)
            if self.warmup_.n >= self.min_num_instances:
                self.center_ = self.warmup_.mean
                self.scale_ = self.warmup_.std
            return NO_SIGNAL
        z = _standardize(x, self.center_, self.scale_)
        self.g_pos_ = max(0.0, self.g_pos_ + z - self.delta)
        self.g_neg_ = max(0.0, self.g_neg_ - z - self.delta)
        if max(self.g_pos_, self.g_neg_) > self.threshold:
            return DetectionStatus(drift=True)
        return NO_SIGNAL

    def summary(self):
        if not hasattr(self, "g_pos_"):
            return {}
        return {"g_pos": self.g_pos_, "g_neg": self.g_neg_}


class PageHinkley(BaseConceptDrift):
    """Page-Hinkley test for a change in the mean.

    ``m_t = m_{t-1} + (x_t - mean_t - delta)`` with ``mean_t`` the running
    mean including ``x_t``; drift when ``m_t - min(m) > threshold``. With
    ``two_sided=True`` decreases are monitored as well through
    ``m'_t = m'_{t-1} + (x_t - mean_t + delta)`` and ``max(m') - m'_t``.

    Signals are suppressed for the first ``min_num_instances`` values.
    """

    def __init__(self, delta=0.005, threshold=50.0, min_num_instances=30, two_sided=False,
                 callbacks=None):
        self.delta = delta
        self.threshold = threshold
        self.min_num_instances = min_num_instances
        self.two_sided = two_sided
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("delta", self.delta, 0.0, math.inf, low_open=False)
        check_interval("threshold", self.threshold, 0.0, math.inf)
        check_positive_int("min_num_instances", self.min_num_instances)

    def _reset_stats(self):
        self.n_ = 0
        self.mean_ = 0.0
        self.sum_up_ = 0.0
        self.min_up_ = math.inf
        self.sum_down_ = 0.0
        self.max_down_ = -math.inf

    def _step(self, x):
        self.n_ += 1
        self.mean_ += (x - self.mean_) / self.n_
        self.sum_up_ += x - self.mean_ - self.delta
        self.min_up_ = min(self.min_up_, self.sum_up_)
        self.sum_down_ += x - self.mean_ + self.delta
        self.max_down_ = max(self.max_down_, self.sum_down_)
        if self.n_ < self.min_num_instances:
            return NO_SIGNAL
        if self.sum_up_ - self.min_up_ > self.threshold:
            return DetectionStatus(drift=True)
        if self.two_sided and self.max_down_ - self.sum_down_ > self.threshold:
            return DetectionStatus(drift=True)
        return NO_SIGNAL

    def summary(self):
        if not hasattr(self, "n_"):
            return {}
        return {"n": self.n_, "mean": self.mean_, "statistic": self.sum_up_ - self.min_up_}


class GMA(BaseConceptDrift):
    """Geometric moving average chart (Roberts, 1959).

    ``Z_t = (1 - weight) Z_{t-1} + weight x_t`` starting from the mean of the
    first ``min_num_instances`` values, which also fix the in-control mean and
    standard deviation. Drift when
    ``|Z_t - mean| > control_limit * std * sqrt(weight / (2 - weight))``.

    ``weight=0.1`` and ``control_limit=3`` are this package's defaults.
    """

    def __init__(self, weight=0.1, control_limit=3.0, min_num_instances=30, callbacks=None):
        self.weight = weight
        self.control_limit = control_limit
        self.min_num_instances = min_num_instances
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("weight", self.weight, 0.0, 1.0, high_open=False)
        check_interval("control_limit", self.control_limit, 0.0, math.inf)
        check_positive_int("min_num_instances", self.min_num_instances, minimum=2)

    def _reset_stats(self):
        self.warmup_ = StreamStats()
        self.center_ = None
        self.limit_ = None
        self.ewma_ = None

    def _step(self, x):
        if self.center_ is None:
            self.warmup_.update(x)
            if self.warmup_.n >= self.min_num_instances:
                self.center_ = self.warmup_.mean
                self.ewma_ = self.center_
                factor = math.sqrt(self.weight / (2.0 - self.weight))
                self.limit_ = self.control_limit * self.warmup_.std * factor
            return NO_SIGNAL
        self.ewma_ = (1.0 - self.weight) * self.ewma_ + self.weight * x
        if abs(self.ewma_ - self.center_) > self.limit_:
            return DetectionStatus(drift=True)
        return NO_SIGNAL

    def summary(self):
        if getattr(self, "ewma_", None) is None:
            return {}
        return {"ewma": self.ewma_, "center": self.center_, "limit": self.limit_}
