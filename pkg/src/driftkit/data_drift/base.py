"""Fit/compare lifecycle shared by the data drift detectors."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from driftkit.core import BATCH, BaseDetector, NotFittedError
from driftkit.validation import CATEGORICAL, NUMERICAL, check_interval, check_samples


@dataclass
class ReferenceSet:
    """Reference samples stored by ``fit``, one array per feature."""

    columns: list
    kinds: tuple
    fit_time: float = 0.0

    @property
    def n_features(self):
        return len(self.columns)

    @property
    def n_samples(self):
        return self.columns[0].size


@dataclass
class ComparisonResult:
    """Outcome of comparing a test sample with the reference.

    Attributes
    ----------
    method : str
    statistic : float
        Test statistic or distance.
    p_value : float or None
        Always set by statistical tests; distances only get one from a
        permutation callback.
    drift : bool or None
        ``None`` when the detector has no decision rule configured (a
        distance without threshold).
    breakdown : list of ComparisonResult, optional
        Per-feature results for multivariate marginal comparisons.
    extras : dict
        Method specific diagnostics (degrees of freedom, smoothing, clipping
        counts, saturation flags, permutation p-values, ...).
    """

    method: str
    statistic: float
    p_value: float | None = None
    drift: bool | None = None
    breakdown: list | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "method": self.method,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "drift": self.drift,
            "extras": _plain(self.extras),
        }
        if self.breakdown is not None:
            out["breakdown"] = [r.to_dict() for r in self.breakdown]
        return out


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


class BaseDataDrift(BaseDetector):
    """Batch detector: ``fit`` stores a reference, ``compare`` tests a batch.

    Subclasses implement ``_statistic(ref_columns, test_columns)`` and
    ``_compare(ref_columns, test_columns)``. ``compare`` never modifies the
    stored reference.
    """

    _category = BATCH
    _kinds = (NUMERICAL,)
    _multivariate = False
    method = ""

    def fit(self, X, y=None):
        """Store ``X`` as the reference distribution. Refitting replaces it."""
        columns, kinds = check_samples(X)
        self._check_columns(columns, kinds)
        self._dispatch("on_fit_start", {"X": columns})
        self._clear_state()
        self.reference_ = ReferenceSet(columns, kinds, time.time())
        self._dispatch("on_fit_end", {"reference": self.reference_})
        return self

    def _clear_state(self):
        for name in self._state_names():
            delattr(self, name)

    def _check_columns(self, columns, kinds):
        if not self._multivariate and len(columns) != 1:
            raise ValueError(
                f"{type(self).__name__} is univariate, got {len(columns)} features; "
                "wrap it in MultivariateMarginals"
            )
        for j, kind in enumerate(kinds):
            if kind not in self._kinds:
                raise ValueError(f"{type(self).__name__} does not accept {kind} feature {j}")

    def _check_fitted(self):
        if not hasattr(self, "reference_"):
            raise NotFittedError(f"{type(self).__name__} must be fitted before use")

    def _test_columns(self, X):
        self._check_fitted()
        columns, _ = check_samples(X, kinds=self.reference_.kinds)
        return columns

    def compare(self, X) -> ComparisonResult:
        """Compare the batch ``X`` with the stored reference."""
        columns = self._test_columns(X)
        self._dispatch("on_compare_start", {"X": columns})
        result = self._compare(self.reference_.columns, columns)
        self._dispatch("on_compare_end", {"X": columns, "result": result})
        if result.drift:
            self._dispatch("on_drift_detected", {"result": result})
        return result

    def predict(self, X) -> bool:
        """Drift flag of ``compare(X)`` (``False`` when undecided)."""
        return bool(self.compare(X).drift)

    def statistic(self, ref, test) -> float:
        """Statistic between two raw samples, as used by permutation tests."""
        ref_cols = _as_columns(ref)
        test_cols = _as_columns(test)
        return self._statistic(ref_cols, test_cols)

    def _statistic(self, ref_columns, test_columns):
        raise NotImplementedError

    def _compare(self, ref_columns, test_columns):
        raise NotImplementedError

    def summary(self):
        if not hasattr(self, "reference_"):
            return {}
        return {"n_features": self.reference_.n_features, "n_samples": self.reference_.n_samples}


def _as_columns(X):
    arr = np.asarray(X)
    if arr.ndim == 1:
        return [arr]
    return [arr[:, j] for j in range(arr.shape[1])]


def stack_columns(columns):
    """Inverse of ``_as_columns``: 1-D for one feature, rows otherwise."""
    if len(columns) == 1:
        return columns[0]
    return np.column_stack(columns)


class StatisticalTest(BaseDataDrift):
    """Univariate two-sample test; drift when ``p_value < alpha``."""

    def _check_alpha(self):
        check_interval("alpha", self.alpha, 0.0, 1.0)

    def _check_params(self):
        self._check_alpha()

    def _result(self, statistic, p_value, **extras):
        return ComparisonResult(
            method=self.method,
            statistic=float(statistic),
            p_value=float(p_value),
            drift=bool(p_value < self.alpha),
            extras=extras,
        )


__all__ = [
    "BaseDataDrift",
    "CATEGORICAL",
    "ComparisonResult",
    "NUMERICAL",
    "ReferenceSet",
    "StatisticalTest",
    "stack_columns",
]
