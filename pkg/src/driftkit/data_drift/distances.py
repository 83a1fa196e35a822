"""Distance-based data drift detectors.

Distances report a number, not a decision: ``drift`` is ``None`` unless a
``threshold`` is configured (drift when the distance exceeds it) or a
permutation callback supplies a p-value.
"""

from __future__ import annotations

import math

import numpy as np

from driftkit.data_drift.base import BaseDataDrift, ComparisonResult
from driftkit.numerics import build_categorical_pair, build_histogram_pair
from driftkit.validation import CATEGORICAL, NUMERICAL, check_interval, check_positive_int


def bhattacharyya_coefficient(p, q):
    return float(np.sum(np.sqrt(p * q)))


def hellinger(p, q):
    """sqrt(1 - BC), evaluated as sqrt(sum (sqrt p - sqrt q)^2 / 2).

    The two agree for normalized histograms; the second form avoids the
    cancellation in ``1 - BC`` near identity.
    """
    gap = np.sqrt(p) - np.sqrt(q)
    return min(1.0, math.sqrt(0.5 * float(np.sum(gap * gap))))


def bhattacharyya(p, q):
    """-ln(BC); infinite for disjoint supports."""
    bc = bhattacharyya_coefficient(p, q)
    return -math.log(bc) if bc > 0.0 else math.inf


def kl_divergence(p, q):
    """KL(p || q) in nats; infinite when q misses mass of p."""
    mask = p > 0
    if np.any(q[mask] == 0):
        return math.inf
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def js_divergence(p, q):
    """Jensen-Shannon divergence in nats, at most ln 2."""
    m = 0.5 * (p + q)
    return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m)


def psi(p, q):
    """Population stability index sum (q - p) ln(q / p) of test ``q`` vs reference ``p``."""
    if np.any((p == 0) != (q == 0)):
        return math.inf
    mask = p > 0
    return float(np.sum((q[mask] - p[mask]) * np.log(q[mask] / p[mask])))


def histogram_intersection(p, q):
    """Intersection distance 1 - sum min(p, q)."""
    return max(0.0, 1.0 - float(np.sum(np.minimum(p, q))))


class HistogramDistance(BaseDataDrift):
    """Distance between reference-anchored histograms of one feature.

    Numerical features are binned over the reference range (``bins``
    intervals, ``strategy`` equal width or equal frequency, test values
    clipped into the end bins); categorical features use one bin per
    category.

    Parameters
    ----------
    bins : int, default=10
    strategy : {"equal_width", "equal_frequency"}
    smoothing : float, default=1e-9
        Per-bin pseudo count, as a fraction of the sample size.
    threshold : float, optional
        Distance above which drift is reported.
    """

    _kinds = (NUMERICAL, CATEGORICAL)
    # distances whose closed form needs strictly positive bins use the
    # smoothed histograms; the others use raw proportions
    _smoothed = False

    def __init__(self, bins=10, strategy="equal_width", smoothing=1e-9, threshold=None,
                 callbacks=None):
        self.bins = bins
        self.strategy = strategy
        self.smoothing = smoothing
        self.threshold = threshold
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_positive_int("bins", self.bins, minimum=2)
        if self.strategy not in ("equal_width", "equal_frequency"):
            raise ValueError(f"unknown binning strategy {self.strategy!r}")
        check_interval("smoothing", self.smoothing, 0.0, 1.0)
        if self.threshold is not None:
            check_interval("threshold", self.threshold, 0.0, math.inf, low_open=False)

    def _pair(self, ref, test):
        if ref.dtype == object:
            return build_categorical_pair(ref, test, self.smoothing)
        return build_histogram_pair(ref, test, self.bins, self.strategy, self.smoothing)

    def _distance(self, p, q):
        raise NotImplementedError

    def _evaluate(self, ref, test):
        pair = self._pair(ref, test)
        raw = self._distance(pair.p_raw, pair.q_raw)
        if self._smoothed or math.isinf(raw):
            value = self._distance(pair.p, pair.q)
        else:
            value = raw
        return value, pair, math.isinf(raw)

    def _statistic(self, ref_columns, test_columns):
        return self._evaluate(ref_columns[0], test_columns[0])[0]

    def _compare(self, ref_columns, test_columns):
        value, pair, saturated = self._evaluate(ref_columns[0], test_columns[0])
        extras = {
            "n_bins": pair.n_bins,
            "clipped": pair.clipped,
            "degenerate_reference": pair.degenerate,
            "smoothing_epsilon_ref": float(pair.epsilon_ref),
            "smoothing_epsilon_test": float(pair.epsilon_test),
            "saturated": saturated,
        }
        extras.update(self._conventions())
        drift = None if self.threshold is None else bool(value > self.threshold)
        return ComparisonResult(self.method, float(value), None, drift, None, extras)

    def _conventions(self):
        return {}


class HellingerDistance(HistogramDistance):
    """Hellinger distance sqrt(1 - sum sqrt(p q)), in [0, 1]."""

    method = "hellinger"

    def _distance(self, p, q):
        return hellinger(p, q)


class BhattacharyyaDistance(HistogramDistance):
    """Bhattacharyya distance -ln(sum sqrt(p q)).

    Disjoint supports make it infinite; the smoothed finite value is reported
    with ``extras["saturated"] = True``.
    """

    method = "bhattacharyya"

    def _distance(self, p, q):
        return bhattacharyya(p, q)


class KLDivergence(HistogramDistance):
    """KL(ref || test) over smoothed histograms, in nats.

    ``extras["saturated"]`` flags bins where the raw divergence would be
    infinite.
    """

    method = "kl"
    _smoothed = True

    def _distance(self, p, q):
        return kl_divergence(p, q)

    def _conventions(self):
        return {"direction": "KL(reference || test)"}


class JSDivergence(HistogramDistance):
    """Jensen-Shannon divergence (natural log), in [0, ln 2]."""

    method = "js"

    def _distance(self, p, q):
        return js_divergence(p, q)


class PSI(HistogramDistance):
    """Population stability index of the test sample against the reference.

    Computed on smoothed histograms; ``extras["saturated"]`` flags bins that
    are empty in exactly one of the two samples.
    """

    method = "psi"
    _smoothed = True

    def _distance(self, p, q):
        return psi(p, q)

    def _conventions(self):
        return {"direction": "sum (test - reference) ln(test / reference)"}


class HistogramIntersection(HistogramDistance):
    """Histogram intersection distance 1 - sum min(p, q), in [0, 1]."""

    method = "histogram_intersection"

    def _distance(self, p, q):
        return histogram_intersection(p, q)


def emd_1d(ref, test):
    """Earth mover's distance between two 1-D empirical distributions.

    Integral of ``|F_ref - F_test|`` between consecutive pooled values,
    with the CDF gap evaluated in integer units ``|m c_ref - n c_test|``.
    """
    ref = np.sort(np.asarray(ref, dtype=np.float64))
    test = np.sort(np.asarray(test, dtype=np.float64))
    n, m = ref.size, test.size
    points = np.unique(np.concatenate([ref, test]))
    if points.size < 2:
        return 0.0
    c_ref = np.searchsorted(ref, points[:-1], side="right").astype(np.float64)
    c_test = np.searchsorted(test, points[:-1], side="right").astype(np.float64)
    gaps = np.abs(m * c_ref - n * c_test)
    return float(np.sum(gaps * np.diff(points)) / (n * m))


class EMD(BaseDataDrift):
    """One-dimensional earth mover's (Wasserstein-1) distance."""

    method = "emd"

    def __init__(self, threshold=None, callbacks=None):
        self.threshold = threshold
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        if self.threshold is not None:
            check_interval("threshold", self.threshold, 0.0, math.inf, low_open=False)

    def _statistic(self, ref_columns, test_columns):
        return emd_1d(ref_columns[0], test_columns[0])

    def _compare(self, ref_columns, test_columns):
        value = self._statistic(ref_columns, test_columns)
        drift = None if self.threshold is None else bool(value > self.threshold)
        return ComparisonResult(self.method, value, None, drift)


def _rows(columns):
    return np.column_stack([np.asarray(c, dtype=np.float64) for c in columns])


def _sq_distances(a, b):
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def median_heuristic(X, Y):
    """Median pairwise Euclidean distance over the pooled rows (distinct pairs)."""
    pooled = np.concatenate([X, Y])
    d2 = _sq_distances(pooled, pooled)
    upper = d2[np.triu_indices(pooled.shape[0], k=1)]
    if upper.size == 0:
        return 0.0
    return float(np.sqrt(np.median(upper)))


def mmd_squared(X, Y, sigma, unbiased=False):
    """Squared MMD with RBF kernel exp(-||x - y||^2 / (2 sigma^2)).

    The biased estimator averages every kernel entry (0 for identical
    samples); ``unbiased=True`` drops the diagonals of the within-sample
    terms.
    """
    scale = 2.0 * sigma * sigma
    kxx = np.exp(-_sq_distances(X, X) / scale)
    kyy = np.exp(-_sq_distances(Y, Y) / scale)
    kxy = np.exp(-_sq_distances(X, Y) / scale)
    n, m = X.shape[0], Y.shape[0]
    if unbiased:
        if n < 2 or m < 2:
            raise ValueError("unbiased MMD needs at least two rows per sample")
        xx = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
        yy = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    else:
        xx = kxx.mean()
        yy = kyy.mean()
    return float(xx + yy - 2.0 * kxy.mean())


class MMD(BaseDataDrift):
    """Maximum mean discrepancy with an RBF kernel over all features.

    Parameters
    ----------
    sigma : float, optional
        Kernel bandwidth. By default the median pairwise distance of the
        pooled reference and test rows, computed at compare time; 1 is used
        when that median is 0.
    unbiased : bool, default=False
        Use the unbiased estimator instead of the biased one.
    threshold : float, optional
    """

    method = "mmd"
    _multivariate = True

    def __init__(self, sigma=None, unbiased=False, threshold=None, callbacks=None):
        self.sigma = sigma
        self.unbiased = unbiased
        self.threshold = threshold
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        if self.sigma is not None:
            check_interval("sigma", self.sigma, 0.0, math.inf)
        if self.threshold is not None:
            check_interval("threshold", self.threshold, -math.inf, math.inf)

    def _bandwidth(self, X, Y):
        if self.sigma is not None:
            return float(self.sigma), False
        sigma = median_heuristic(X, Y)
        if sigma > 0.0:
            return sigma, False
        return 1.0, True

    def _statistic(self, ref_columns, test_columns):
        X, Y = _rows(ref_columns), _rows(test_columns)
        return mmd_squared(X, Y, self._bandwidth(X, Y)[0], self.unbiased)

    def _compare(self, ref_columns, test_columns):
        X, Y = _rows(ref_columns), _rows(test_columns)
        sigma, fallback = self._bandwidth(X, Y)
        value = mmd_squared(X, Y, sigma, self.unbiased)
        drift = None if self.threshold is None else bool(value > self.threshold)
        extras = {
            "sigma": sigma,
            "sigma_fallback": fallback,
            "estimator": "unbiased" if self.unbiased else "biased",
        }
        return ComparisonResult(self.method, value, None, drift, None, extras)
