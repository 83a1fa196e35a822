"""Input validation helpers shared by all detectors."""

from __future__ import annotations

import math
import numbers

import numpy as np

NUMERICAL = "numerical"
CATEGORICAL = "categorical"


def check_finite_value(value) -> float:
    """Return ``value`` as a float, rejecting non-numbers and non-finite input."""
    if isinstance(value, (bool, np.bool_)):
        return float(value)
    if not isinstance(value, numbers.Real):
        raise TypeError(f"expected a real number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"value must be finite, got {value}")
    return value


def check_binary_value(value) -> int:
    value = check_finite_value(value)
    if value not in (0.0, 1.0):
        raise ValueError(f"value must be 0 or 1, got {value}")
    return int(value)


def check_unit_interval_value(value) -> float:
    value = check_finite_value(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value must lie in [0, 1], got {value}")
    return value


def check_interval(name, value, low, high, *, low_open=True, high_open=True):
    """Raise ``ValueError`` unless ``low (<|<=) value (<|<=) high``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    ok_low = value > low if low_open else value >= low
    ok_high = value < high if high_open else value <= high
    if not (ok_low and ok_high):
        left = "(" if low_open else "["
        right = ")" if high_open else "]"
        raise ValueError(f"{name} must lie in {left}{low}, {high}{right}, got {value}")


def check_positive_int(name, value, *, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")


def infer_kind(column: np.ndarray) -> str:
    """Classify a 1-D array as numerical or categorical."""
    if column.dtype.kind in "biuf":
        return NUMERICAL
    try:
        column.astype(float)
    except (TypeError, ValueError):
        return CATEGORICAL
    return NUMERICAL


def check_samples(X, *, kinds=None, min_samples=1):
    """Validate a sample matrix.

    Parameters
    ----------
    X : array-like of shape (n_samples,) or (n_samples, n_features)
        Observations. 1-D input is treated as a single feature.
    kinds : sequence of str, optional
        Expected feature kinds. Inferred when omitted.
    min_samples : int
        Minimum number of rows.

    Returns
    -------
    samples : list of ndarray
        One 1-D array per feature; numerical columns are float64, categorical
        columns are object arrays.
    kinds : tuple of str
    """
    arr = np.asarray(X, dtype=object if _has_strings(X) else None)
    if arr.ndim == 0:
        raise ValueError("expected a 1-D or 2-D collection of samples")
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected at most 2 dimensions, got {arr.ndim}")
    if arr.shape[0] < min_samples:
        raise ValueError(f"need at least {min_samples} sample(s), got {arr.shape[0]}")
    if arr.shape[1] == 0:
        raise ValueError("need at least one feature")
    if kinds is None:
        kinds = tuple(infer_kind(arr[:, j]) for j in range(arr.shape[1]))
    elif len(kinds) != arr.shape[1]:
        raise ValueError(f"expected {len(kinds)} feature(s), got {arr.shape[1]}")
    columns = []
    for j, kind in enumerate(kinds):
        col = arr[:, j]
        if kind == NUMERICAL:
            try:
                col = col.astype(np.float64)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"feature {j} is not numerical") from exc
            if not np.all(np.isfinite(col)):
                raise ValueError(f"feature {j} contains non-finite values")
        elif kind == CATEGORICAL:
            if np.asarray(X).dtype.kind in "biuf":
                raise ValueError(f"feature {j} is categorical but got numerical values")
            col = col.astype(object)
        else:
            raise ValueError(f"unknown feature kind {kind!r}")
        columns.append(col)
    return columns, tuple(kinds)


def _has_strings(X) -> bool:
    if isinstance(X, np.ndarray):
        return X.dtype.kind in "OUS"
    try:
        first = X[0]
    except (TypeError, IndexError, KeyError):
        return False
    if isinstance(first, str):
        return True
    if isinstance(first, (list, tuple)):
        return any(isinstance(v, str) for row in X for v in row)
    return False
