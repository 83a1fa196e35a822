"""Hoeffding-bound drift detectors (Frías-Blanco et al., 2014).

Both detectors take values in [0, 1] (error indicators or bounded metrics)
and monitor an increase of the mean by default.
"""

from __future__ import annotations

import math

from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.validation import check_interval, check_unit_interval_value


def hoeffding_bound(n, delta):
    """Deviation bound sqrt(ln(1/delta) / (2 n)) for a mean of ``n`` values in [0, 1]."""
    return math.sqrt(math.log(1.0 / delta) / (2.0 * n))


def _check_confidences(drift_confidence, warning_confidence):
    check_interval("drift_confidence", drift_confidence, 0.0, 1.0)
    check_interval("warning_confidence", warning_confidence, 0.0, 1.0)
    if warning_confidence <= drift_confidence:
        raise ValueError("warning_confidence must exceed drift_confidence")


class HDDM_A(BaseConceptDrift):
    """HDDM with the A-test (moving averages).

    The cut point is the prefix whose mean plus Hoeffding bound is smallest.
    An increase is flagged when ``mean(all) - mean(prefix)`` reaches the
    bound on a difference of two means, which is ``hoeffding_bound`` at the
    effective size ``n_cut * n / (n - n_cut)``.
    """

    def __init__(self, drift_confidence=0.001, warning_confidence=0.005, two_sided=False,
                 callbacks=None):
        self.drift_confidence = drift_confidence
        self.warning_confidence = warning_confidence
        self.two_sided = two_sided
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        _check_confidences(self.drift_confidence, self.warning_confidence)

    def _check_value(self, value):
        return check_unit_interval_value(value)

    def _reset_stats(self):
        self.n_ = 0
        self.total_ = 0.0
        self.n_min_ = 0
        self.total_min_ = 0.0
        self.n_max_ = 0
        self.total_max_ = 0.0

    def _step(self, x):
        self.n_ += 1
        self.total_ += x
        n, total = self.n_, self.total_
        if self.n_min_ == 0 or (
            self.total_min_ / self.n_min_ + hoeffding_bound(self.n_min_, self.drift_confidence)
            >= total / n + hoeffding_bound(n, self.drift_confidence)
        ):
            self.n_min_, self.total_min_ = n, total
        if self.n_max_ == 0 or (
            self.total_max_ / self.n_max_ - hoeffding_bound(self.n_max_, self.drift_confidence)
            <= total / n - hoeffding_bound(n, self.drift_confidence)
        ):
            self.n_max_, self.total_max_ = n, total

        gaps = [self._difference(self.n_min_, self.total_min_, +1.0)]
        if self.two_sided:
            gaps.append(self._difference(self.n_max_, self.total_max_, -1.0))
        gaps = [g for g in gaps if g is not None]
        for confidence, status in (
            (self.drift_confidence, DetectionStatus(drift=True)),
            (self.warning_confidence, DetectionStatus(warning=True)),
        ):
            if any(gap > hoeffding_bound(size, confidence) for gap, size in gaps):
                return status
        return NO_SIGNAL

    def _difference(self, n_cut, total_cut, sign):
        """Signed mean gap since the cut and its effective sample size."""
        if n_cut == self.n_:
            return None
        gap = sign * (self.total_ / self.n_ - total_cut / n_cut)
        return gap, n_cut * self.n_ / (self.n_ - n_cut)

    def summary(self):
        if not getattr(self, "n_", 0):
            return {}
        return {"n": self.n_, "mean": self.total_ / self.n_}


class _EwmaSample:
    """EWMA estimate with the sum of squared weights of its terms."""

    __slots__ = ("estimate", "weight_sq")

    def __init__(self, estimate=None, weight_sq=0.0):
        self.estimate = estimate
        self.weight_sq = weight_sq

    def add(self, x, lam):
        if self.estimate is None:
            self.estimate = x
            self.weight_sq = 1.0
        else:
            self.estimate = lam * x + (1.0 - lam) * self.estimate
            self.weight_sq = lam * lam + (1.0 - lam) ** 2 * self.weight_sq

    def to_list(self):
        return [self.estimate, self.weight_sq]

    @classmethod
    def from_list(cls, values):
        return cls(values[0], values[1])


def mcdiarmid_bound(weight_sq, delta):
    """sqrt(sum w_i^2 ln(1/delta) / 2) for a weighted sum of values in [0, 1]."""
    return math.sqrt(weight_sq * math.log(1.0 / delta) / 2.0)


class HDDM_W(BaseConceptDrift):
    """HDDM with the W-test (exponentially weighted moving averages).

    The weighted estimate of the whole stream and of the portion after the
    cut point are compared with McDiarmid's bound on the combined squared
    weights.
    """

    def __init__(self, drift_confidence=0.001, warning_confidence=0.005, weight=0.05,
                 two_sided=False, callbacks=None):
        self.drift_confidence = drift_confidence
        self.warning_confidence = warning_confidence
        self.weight = weight
        self.two_sided = two_sided
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        _check_confidences(self.drift_confidence, self.warning_confidence)
        check_interval("weight", self.weight, 0.0, 1.0)

    def _check_value(self, value):
        return check_unit_interval_value(value)

    def _reset_stats(self):
        self.total_ = _EwmaSample()
        self.incr_cut_ = math.inf
        self.incr_before_ = _EwmaSample()
        self.incr_after_ = _EwmaSample()
        self.decr_cut_ = math.inf
        self.decr_before_ = _EwmaSample()
        self.decr_after_ = _EwmaSample()

    def _step(self, x):
        lam = self.weight
        self.total_.add(x, lam)
        bound = mcdiarmid_bound(self.total_.weight_sq, self.drift_confidence)

        if self.total_.estimate + bound < self.incr_cut_:
            self.incr_cut_ = self.total_.estimate + bound
            self.incr_before_ = _EwmaSample(self.total_.estimate, self.total_.weight_sq)
            self.incr_after_ = _EwmaSample()
        else:
            self.incr_after_.add(x, lam)

        if self.two_sided:
            if -self.total_.estimate + bound < self.decr_cut_:
                self.decr_cut_ = -self.total_.estimate + bound
                self.decr_before_ = _EwmaSample(self.total_.estimate, self.total_.weight_sq)
                self.decr_after_ = _EwmaSample()
            else:
                self.decr_after_.add(x, lam)

        tests = [(self.incr_before_, self.incr_after_, 1.0)]
        if self.two_sided:
            tests.append((self.decr_before_, self.decr_after_, -1.0))
        for confidence, status in (
            (self.drift_confidence, DetectionStatus(drift=True)),
            (self.warning_confidence, DetectionStatus(warning=True)),
        ):
            for before, after, sign in tests:
                if _mean_shift(before, after, sign, confidence):
                    return status
        return NO_SIGNAL

    def summary(self):
        if not hasattr(self, "total_") or self.total_.estimate is None:
            return {}
        return {"estimate": self.total_.estimate}


def _mean_shift(before, after, sign, confidence):
    if before.estimate is None or after.estimate is None:
        return False
    bound = mcdiarmid_bound(before.weight_sq + after.weight_sq, confidence)
    return sign * (after.estimate - before.estimate) > bound
