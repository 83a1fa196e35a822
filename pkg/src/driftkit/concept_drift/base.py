from __future__ import annotations

import math

from driftkit.core import NO_SIGNAL, STREAMING, BaseDetector, DetectionStatus
from driftkit.validation import check_binary_value, check_finite_value


class StreamStats:
    """Welford running mean and variance."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self, n=0, mean=0.0, m2=0.0):
        self.n = n
        self.mean = mean
        self.m2 = m2

    def update(self, x: float):
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    @property
    def variance(self) -> float:
        """Sample variance (``ddof=1``); 0 with fewer than two values."""
        if self.n < 2:
            return 0.0
        return max(self.m2 / (self.n - 1), 0.0)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def to_list(self):
        return [self.n, self.mean, self.m2]

    @classmethod
    def from_list(cls, values):
        n, mean, m2 = values
        return cls(int(n), float(mean), float(m2))


class BaseConceptDrift(BaseDetector):
    """Streaming detector consuming one value per ``update``.

    Subclasses implement ``_reset_stats`` (create the statistical state) and
    ``_step`` (consume one validated value and return a ``DetectionStatus``).
    After a drift the statistical state is rebuilt on the next update through
    ``_restart_after_drift``; the step counter keeps running.
    """

    _category = STREAMING
    _binary_input = False

    def _check_value(self, value):
        if self._binary_input:
            return check_binary_value(value)
        return check_finite_value(value)

    def _ensure_state(self):
        if not hasattr(self, "step_"):
            self.step_ = 0
            self.status_ = NO_SIGNAL
            self._reset_stats()

    def _reset_stats(self):
        raise NotImplementedError

    def _restart_after_drift(self):
        self._reset_stats()

    def _step(self, value) -> DetectionStatus:
        raise NotImplementedError

    def update(self, value) -> DetectionStatus:
        """Consume one value and report whether drift or warning holds."""
        value = self._check_value(value)
        self._ensure_state()
        step = self.step_ + 1
        self._dispatch("on_update_start", {"step": step, "value": value})
        if self.status_.drift:
            self._restart_after_drift()
        status = self._step(value)
        self.step_ = step
        self.status_ = status
        payload = {"step": step, "value": value, "status": status}
        self._dispatch("on_update_end", payload)
        if status.drift:
            self._dispatch("on_drift_detected", payload)
        return status

    def update_many(self, values):
        """Feed a sequence of values; returns the list of statuses."""
        return [self.update(v) for v in values]

    @property
    def drift(self) -> bool:
        return hasattr(self, "status_") and self.status_.drift

    @property
    def warning(self) -> bool:
        return hasattr(self, "status_") and self.status_.warning


def ddm_signal(level, p_min, s_min, warning_level, drift_level) -> DetectionStatus:
    """Two-tier rule shared by DDM and RDDM.

    ``level = p + s`` is compared with ``p_min + k * s_min`` using ``>=``. A
    level equal to the recorded minimum never signals, which only matters when
    ``s_min == 0`` (an error-free prefix).
    """
    if not level > p_min + s_min:
        return NO_SIGNAL
    if level >= p_min + drift_level * s_min:
        return DetectionStatus(drift=True)
    if level >= p_min + warning_level * s_min:
        return DetectionStatus(warning=True)
    return NO_SIGNAL
