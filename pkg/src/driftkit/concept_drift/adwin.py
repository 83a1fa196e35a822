"""ADWIN adaptive windowing (Bifet and Gavaldà, 2007)."""

from __future__ import annotations

import math

from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.validation import check_interval, check_positive_int

TOTAL, M2, COUNT = 0, 1, 2


def adwin_cut_threshold(n0, n1, variance, delta):
    """epsilon_cut for sub-windows of sizes ``n0`` and ``n1``.

    ``sqrt(2/m * variance * d) + 2/(3m) * d`` with ``1/m = 1/n0 + 1/n1`` and
    ``d = ln(2 ln(n) / delta)``, ``n = n0 + n1``.
    """
    n = n0 + n1
    d = math.log(2.0 * math.log(n) / delta)
    inv_m = 1.0 / n0 + 1.0 / n1
    return math.sqrt(2.0 * inv_m * variance * d) + 2.0 / 3.0 * inv_m * d


class ADWIN(BaseConceptDrift):
    """Adaptive sliding window over a real-valued stream.

    The window is stored as an exponential histogram: row ``i`` holds up to
    ``max_buckets`` buckets of ``2**i`` values, each keeping the sum and the
    sum of squared deviations of its values. Every ``clock`` insertions all
    bucket boundaries that leave at least ``min_window_length`` values on
    both sides are scanned from the oldest; the first split whose sub-window
    means differ by more than ``adwin_cut_threshold`` drops the older part,
    and the scan restarts until no split qualifies. A drift is reported
    whenever at least one cut happened in the scan.
    """

    def __init__(self, delta=0.002, clock=32, max_buckets=5, min_window_length=5,
                 callbacks=None):
        self.delta = delta
        self.clock = clock
        self.max_buckets = max_buckets
        self.min_window_length = min_window_length
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("delta", self.delta, 0.0, 1.0)
        check_positive_int("clock", self.clock)
        check_positive_int("max_buckets", self.max_buckets, minimum=2)
        check_positive_int("min_window_length", self.min_window_length)

    def _reset_stats(self):
        # rows[i] lists buckets of 2**i values, oldest first
        self.rows_ = [[]]
        self.width_ = 0
        self.total_ = 0.0
        self.m2_ = 0.0
        self.ticks_ = 0

    def _restart_after_drift(self):
        pass

    @property
    def estimation(self):
        """Mean of the current window, ``None`` when empty."""
        width = getattr(self, "width_", 0)
        return self.total_ / width if width else None

    @property
    def variance(self):
        width = getattr(self, "width_", 0)
        return self.m2_ / width if width else None

    def _step(self, x):
        self._insert(x)
        self.ticks_ += 1
        if self.ticks_ % self.clock:
            return NO_SIGNAL
        if self._detect_and_cut():
            return DetectionStatus(drift=True)
        return NO_SIGNAL

    def _insert(self, x):
        if self.width_:
            mean = self.total_ / self.width_
            self.m2_ += self.width_ * (x - mean) ** 2 / (self.width_ + 1)
        self.width_ += 1
        self.total_ += x
        self.rows_[0].append([x, 0.0, 1])
        self._compress()

    def _compress(self):
        level = 0
        while level < len(self.rows_) and len(self.rows_[level]) > self.max_buckets:
            older, newer = self.rows_[level][0], self.rows_[level][1]
            del self.rows_[level][:2]
            n_a, n_b = older[COUNT], newer[COUNT]
            mean_diff = older[TOTAL] / n_a - newer[TOTAL] / n_b
            merged = [
                older[TOTAL] + newer[TOTAL],
                older[M2] + newer[M2] + n_a * n_b / (n_a + n_b) * mean_diff**2,
                n_a + n_b,
            ]
            if level + 1 == len(self.rows_):
                self.rows_.append([])
            self.rows_[level + 1].append(merged)
            level += 1

    def _buckets_oldest_first(self):
        for row in reversed(self.rows_):
            yield from row

    def _find_cut(self):
        """Number of oldest values to drop, or ``None`` if no split qualifies."""
        width = self.width_
        if width < 2 * self.min_window_length:
            return None
        variance = self.m2_ / width
        n0, total0 = 0, 0.0
        for bucket in self._buckets_oldest_first():
            n0 += bucket[COUNT]
            total0 += bucket[TOTAL]
            n1 = width - n0
            if n1 < self.min_window_length:
                break
            if n0 < self.min_window_length:
                continue
            gap = abs(total0 / n0 - (self.total_ - total0) / n1)
            if gap > adwin_cut_threshold(n0, n1, variance, self.delta):
                return n0
        return None

    def _detect_and_cut(self):
        cut_any = False
        while True:
            n_drop = self._find_cut()
            if n_drop is None:
                return cut_any
            cut_any = True
            while n_drop:
                n_drop -= self._drop_oldest_bucket()

    def _drop_oldest_bucket(self):
        row = self.rows_[-1]
        bucket = row.pop(0)
        if not row and len(self.rows_) > 1:
            self.rows_.pop()
        n_b = bucket[COUNT]
        self.width_ -= n_b
        self.total_ -= bucket[TOTAL]
        if self.width_:
            rest_mean = self.total_ / self.width_
            bucket_mean = bucket[TOTAL] / n_b
            self.m2_ -= bucket[M2] + n_b * self.width_ / (self.width_ + n_b) * (
                bucket_mean - rest_mean
            ) ** 2
            self.m2_ = max(self.m2_, 0.0)
        else:
            self.total_ = 0.0
            self.m2_ = 0.0
        return n_b

    def summary(self):
        if not getattr(self, "width_", 0):
            return {}
        return {"width": self.width_, "mean": self.estimation}
