"""Window-comparison detectors: KSWIN and STEPD."""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.numerics import ks_p_value, ks_statistic, normal_sf
from driftkit.validation import check_interval, check_positive_int


class KSWIN(BaseConceptDrift):
    """Kolmogorov-Smirnov windowing (Raab et al., 2020).

    Keeps the last ``window_size`` values. Once the window is full, the
    ``stat_size`` most recent values are compared with ``stat_size`` values
    drawn without replacement from the older part of the window; drift when
    the asymptotic KS p-value falls below ``alpha``. After a drift only the
    most recent ``stat_size`` values are kept.

    Parameters
    ----------
    alpha : float, default=0.0001
    window_size : int, default=100
    stat_size : int, default=30
    random_state : int, default=0
        Seed of the subsampling generator; reset restores it.
    """

    def __init__(self, alpha=0.0001, window_size=100, stat_size=30, random_state=0,
                 callbacks=None):
        self.alpha = alpha
        self.window_size = window_size
        self.stat_size = stat_size
        self.random_state = random_state
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("alpha", self.alpha, 0.0, 1.0)
        check_positive_int("window_size", self.window_size, minimum=2)
        check_positive_int("stat_size", self.stat_size)
        if 2 * self.stat_size > self.window_size:
            raise ValueError("window_size must be at least twice stat_size")
        check_positive_int("random_state", self.random_state, minimum=0)

    def _ensure_state(self):
        if not hasattr(self, "step_"):
            self.rng_ = np.random.default_rng(self.random_state)
        super()._ensure_state()

    def _reset_stats(self):
        self.window_ = deque(maxlen=self.window_size)
        self.statistic_ = None
        self.p_value_ = None
        self.recent_sample_ = None
        self.older_sample_ = None

    def _restart_after_drift(self):
        recent = list(self.window_)[-self.stat_size:]
        self.window_ = deque(recent, maxlen=self.window_size)

    def _step(self, x):
        self.window_.append(x)
        if len(self.window_) < self.window_size:
            return NO_SIGNAL
        values = np.fromiter(self.window_, dtype=np.float64, count=self.window_size)
        older = values[: -self.stat_size]
        recent = values[-self.stat_size:]
        picked = self.rng_.choice(older.size, size=self.stat_size, replace=False)
        self.older_sample_ = older[picked]
        self.recent_sample_ = recent
        self.statistic_ = ks_statistic(self.older_sample_, recent)
        self.p_value_ = ks_p_value(self.statistic_, self.stat_size, self.stat_size)
        if self.p_value_ < self.alpha:
            return DetectionStatus(drift=True)
        return NO_SIGNAL

    def summary(self):
        if getattr(self, "statistic_", None) is None:
            return {}
        return {"statistic": self.statistic_, "p_value": self.p_value_}


class STEPD(BaseConceptDrift):
    """Statistical test of equal proportions (Nishida and Yamauchi, 2007).

    Input is 1 for a correct prediction and 0 otherwise. The accuracy of the
    last ``window_size`` predictions is compared with the accuracy of all
    older ones by a one-sided two-proportion z-test with continuity
    correction; a significantly lower recent accuracy is a warning below
    ``alpha_warning`` and a drift below ``alpha_drift``. Testing starts once
    the older part holds ``window_size`` predictions.
    """

    _binary_input = True

    def __init__(self, window_size=30, alpha_warning=0.05, alpha_drift=0.003, callbacks=None):
        self.window_size = window_size
        self.alpha_warning = alpha_warning
        self.alpha_drift = alpha_drift
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_positive_int("window_size", self.window_size)
        check_interval("alpha_warning", self.alpha_warning, 0.0, 1.0)
        check_interval("alpha_drift", self.alpha_drift, 0.0, 1.0)
        if self.alpha_drift >= self.alpha_warning:
            raise ValueError("alpha_drift must be below alpha_warning")

    def _reset_stats(self):
        self.recent_ = deque(maxlen=self.window_size)
        self.n_older_ = 0
        self.correct_older_ = 0
        self.p_value_ = None

    def _step(self, correct):
        if len(self.recent_) == self.window_size:
            self.n_older_ += 1
            self.correct_older_ += self.recent_[0]
        self.recent_.append(correct)
        if self.n_older_ < self.window_size:
            return NO_SIGNAL
        self.p_value_ = stepd_p_value(
            self.correct_older_, self.n_older_, sum(self.recent_), self.window_size
        )
        if self.p_value_ < self.alpha_drift:
            return DetectionStatus(drift=True)
        if self.p_value_ < self.alpha_warning:
            return DetectionStatus(warning=True)
        return NO_SIGNAL

    def summary(self):
        if getattr(self, "p_value_", None) is None:
            return {}
        return {"p_value": self.p_value_, "n_older": self.n_older_}


def stepd_p_value(correct_older, n_older, correct_recent, n_recent):
    """One-sided p-value that the recent accuracy is lower than the older one."""
    acc_older = correct_older / n_older
    acc_recent = correct_recent / n_recent
    if acc_recent >= acc_older:
        return 1.0
    pooled = (correct_older + correct_recent) / (n_older + n_recent)
    inv = 1.0 / n_older + 1.0 / n_recent
    var = pooled * (1.0 - pooled) * inv
    if var <= 0.0:
        return 1.0
    z = (abs(acc_older - acc_recent) - 0.5 * inv) / math.sqrt(var)
    return normal_sf(z)
