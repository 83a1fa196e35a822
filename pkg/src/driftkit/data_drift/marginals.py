"""Multivariate comparisons as a set of per-feature univariate tests."""

from __future__ import annotations

from sklearn.base import clone

from driftkit.core import BATCH, BaseDetector, NotFittedError
from driftkit.data_drift.base import BaseDataDrift, ComparisonResult
from driftkit.validation import check_interval, check_samples


class MultivariateMarginals(BaseDetector):
    """Run a univariate detector on every feature.

    Each feature gets its own clone of ``detector``. Per-feature results are
    returned in ``breakdown`` with their drift flags recomputed under the
    correction. Overall drift holds when any corrected p-value is below
    ``alpha`` (``bonferroni`` compares with ``alpha / n_features``). For
    distance detectors without p-values the per-feature thresholds decide.

    The overall statistic and p-value are those of the most significant
    feature (smallest p-value, or largest distance); with Bonferroni the
    p-value is multiplied by the feature count and capped at 1.
    """

    _category = BATCH

    def __init__(self, detector, correction="none", alpha=0.05, callbacks=None):
        self.detector = detector
        self.correction = correction
        self.alpha = alpha
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        if not isinstance(self.detector, BaseDataDrift):
            raise TypeError("detector must be a batch data drift detector")
        if self.correction not in ("none", "bonferroni"):
            raise ValueError(f"correction must be 'none' or 'bonferroni', got {self.correction!r}")
        check_interval("alpha", self.alpha, 0.0, 1.0)

    @property
    def method(self):
        return self.detector.method

    def fit(self, X, y=None):
        columns, kinds = check_samples(X)
        self._dispatch("on_fit_start", {"X": columns})
        detectors = []
        for column in columns:
            est = clone(self.detector)
            est.fit(column)
            detectors.append(est)
        for name in self._state_names():
            delattr(self, name)
        self.detectors_ = detectors
        self.kinds_ = kinds
        self._dispatch("on_fit_end", {"kinds": kinds})
        return self

    def feature_threshold(self):
        """Per-feature significance level after correction."""
        n = len(self.detectors_)
        return self.alpha / n if self.correction == "bonferroni" else self.alpha

    def compare(self, X) -> ComparisonResult:
        if not hasattr(self, "detectors_"):
            raise NotFittedError("MultivariateMarginals must be fitted before use")
        columns, _ = check_samples(X, kinds=self.kinds_)
        self._dispatch("on_compare_start", {"X": columns})
        level = self.feature_threshold()
        k = len(columns)
        breakdown = []
        for j, (est, column) in enumerate(zip(self.detectors_, columns)):
            res = est.compare(column)
            if res.p_value is not None:
                res.drift = bool(res.p_value < level)
            res.extras["feature"] = j
            breakdown.append(res)

        with_p = [r for r in breakdown if r.p_value is not None]
        if with_p:
            best = min(with_p, key=lambda r: r.p_value)
            p_value = best.p_value
            if self.correction == "bonferroni":
                p_value = min(1.0, p_value * k)
        else:
            best = max(breakdown, key=lambda r: r.statistic)
            p_value = None
        flags = [r.drift for r in breakdown if r.drift is not None]
        drift = any(flags) if flags else None
        result = ComparisonResult(
            method=self.method,
            statistic=best.statistic,
            p_value=p_value,
            drift=drift,
            breakdown=breakdown,
            extras={
                "correction": self.correction,
                "feature_alpha": level,
                "most_significant_feature": best.extras["feature"],
            },
        )
        self._dispatch("on_compare_end", {"X": columns, "result": result})
        if result.drift:
            self._dispatch("on_drift_detected", {"result": result})
        return result

    def predict(self, X) -> bool:
        return bool(self.compare(X).drift)
