"""Statistical kernels shared by the detectors.

Empirical CDFs, midranks, reference-anchored histograms, upper-tail
probabilities and the permutation-test engine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from driftkit.validation import check_positive_int

KOLMOGOROV_TERM_TOL = 1e-12
DEFAULT_EXACT_THRESHOLD = 20_000


class Ecdf:
    """Right-continuous empirical CDF of a sample."""

    def __init__(self, values):
        values = np.sort(np.asarray(values, dtype=np.float64).ravel())
        if values.size == 0:
            raise ValueError("Ecdf needs at least one value")
        self.values = values
        self.n = values.size

    def __call__(self, x):
        counts = np.searchsorted(self.values, x, side="right")
        return counts / self.n


def ecdf_eval(ecdf: Ecdf, x):
    return ecdf(x)


def midranks(values) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean of the ranks they cover."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("midranks needs a nonempty input")
    if not np.all(np.isfinite(values)):
        raise ValueError("midranks input must be finite")
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    # start index of each tie group in sorted order
    starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    ends = np.r_[starts[1:], values.size]
    group_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(values.size)
    ranks[order] = np.repeat(group_rank, ends - starts)
    return ranks


@dataclass
class HistogramPair:
    """Reference and test histograms over identical bins.

    ``p`` and ``q`` are the smoothed probabilities; ``ref_counts`` and
    ``test_counts`` the raw counts. Numerical pairs carry bin ``edges``,
    categorical pairs carry ``categories``.
    """

    ref_counts: np.ndarray
    test_counts: np.ndarray
    p: np.ndarray
    q: np.ndarray
    epsilon_ref: float
    epsilon_test: float
    edges: np.ndarray | None = None
    categories: list | None = None
    clipped: int = 0
    degenerate: bool = False

    @property
    def n_bins(self):
        return self.p.size

    @property
    def p_raw(self):
        return self.ref_counts / self.ref_counts.sum()

    @property
    def q_raw(self):
        return self.test_counts / self.test_counts.sum()


def _smooth(counts, smoothing):
    n = counts.sum()
    eps = smoothing * n
    probs = (counts + eps) / (n + counts.size * eps)
    return probs, eps


def build_histogram_pair(ref, test, bins=10, strategy="equal_width", smoothing=1e-9):
    """Histogram ``ref`` and ``test`` over bins derived from ``ref`` only.

    Test values outside the reference range are clipped into the end bins and
    counted in ``clipped``. Probabilities are smoothed as
    ``(c_i + eps) / (n + k * eps)`` with ``eps = smoothing * n``.
    """
    ref = np.asarray(ref, dtype=np.float64).ravel()
    test = np.asarray(test, dtype=np.float64).ravel()
    if ref.size == 0:
        raise ValueError("reference sample is empty")
    if test.size == 0:
        raise ValueError("test sample is empty")
    check_positive_int("bins", bins, minimum=2)
    lo, hi = ref.min(), ref.max()
    degenerate = False
    if lo == hi:
        pad = max(abs(lo), 1.0) * np.finfo(np.float64).eps * 16
        edges = np.array([lo - pad, hi + pad])
        degenerate = True
    elif strategy == "equal_width":
        edges = np.linspace(lo, hi, bins + 1)
    elif strategy == "equal_frequency":
        edges = np.unique(np.quantile(ref, np.linspace(0.0, 1.0, bins + 1)))
    else:
        raise ValueError(f"unknown binning strategy {strategy!r}")
    k = edges.size - 1
    ref_counts = _bin_counts(ref, edges, k)
    test_counts = _bin_counts(test, edges, k)
    clipped = int(np.count_nonzero((test < edges[0]) | (test > edges[-1])))
    p, eps_ref = _smooth(ref_counts, smoothing)
    q, eps_test = _smooth(test_counts, smoothing)
    return HistogramPair(
        ref_counts=ref_counts,
        test_counts=test_counts,
        p=p,
        q=q,
        epsilon_ref=eps_ref,
        epsilon_test=eps_test,
        edges=edges,
        clipped=clipped,
        degenerate=degenerate,
    )


def _bin_counts(values, edges, k):
    idx = np.searchsorted(edges, values, side="right") - 1
    idx = np.clip(idx, 0, k - 1)
    return np.bincount(idx, minlength=k).astype(np.float64)


def build_categorical_pair(ref, test, smoothing=1e-9):
    """Category-indexed histogram pair over the union of observed categories."""
    ref = list(np.asarray(ref, dtype=object).ravel())
    test = list(np.asarray(test, dtype=object).ravel())
    if not ref:
        raise ValueError("reference sample is empty")
    if not test:
        raise ValueError("test sample is empty")
    categories = sorted(set(ref) | set(test), key=lambda c: (type(c).__name__, str(c)))
    index = {c: i for i, c in enumerate(categories)}
    ref_counts = np.bincount([index[c] for c in ref], minlength=len(categories)).astype(float)
    test_counts = np.bincount([index[c] for c in test], minlength=len(categories)).astype(float)
    p, eps_ref = _smooth(ref_counts, smoothing)
    q, eps_test = _smooth(test_counts, smoothing)
    return HistogramPair(
        ref_counts=ref_counts,
        test_counts=test_counts,
        p=p,
        q=q,
        epsilon_ref=eps_ref,
        epsilon_test=eps_test,
        categories=categories,
    )


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def kolmogorov_sf(lam: float) -> float:
    """Q(lam) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2).

    Below lam = 1.18 the slowly converging alternating series is replaced by
    its Jacobi theta equivalent, 1 - sqrt(2 pi)/lam sum exp(-(2k-1)^2 pi^2 / (8 lam^2)).
    Both series stop once a term drops below 1e-12.
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        if lam < 0.05:
            return 1.0
        total = 0.0
        c = math.pi**2 / (8.0 * lam * lam)
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * c)
            total += term
            if term < KOLMOGOROV_TERM_TOL:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * total))
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < KOLMOGOROV_TERM_TOL:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def tail_probability(dist: str, x: float, df: float | None = None) -> float:
    """Upper-tail probability P(X > x).

    ``dist`` is one of ``"normal"``, ``"chi2"``, ``"t"`` or ``"kolmogorov"``.
    """
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    if dist in ("chi2", "t"):
        if df is None or not df >= 1:
            raise ValueError(f"{dist} tail needs df >= 1, got {df}")
    if dist == "normal":
        return normal_sf(x)
    if dist == "chi2":
        return float(special.chdtrc(df, x)) if x > 0 else 1.0
    if dist == "t":
        return float(special.stdtr(df, -x))
    if dist == "kolmogorov":
        return kolmogorov_sf(x)
    raise ValueError(f"unknown distribution {dist!r}")


def ks_counts_statistic(ref_sorted, test_sorted):
    """Integer form of the two-sample KS statistic.

    Returns ``max |m * #ref<=x - n * #test<=x|`` over all sample points; the
    statistic is that value divided by ``n * m``.
    """
    n, m = ref_sorted.size, test_sorted.size
    points = np.concatenate([ref_sorted, test_sorted])
    c_ref = np.searchsorted(ref_sorted, points, side="right").astype(np.int64)
    c_test = np.searchsorted(test_sorted, points, side="right").astype(np.int64)
    return int(np.abs(c_ref * m - c_test * n).max())


def ks_statistic(x, y) -> float:
    x = np.sort(np.asarray(x, dtype=np.float64).ravel())
    y = np.sort(np.asarray(y, dtype=np.float64).ravel())
    if x.size == 0 or y.size == 0:
        raise ValueError("KS statistic needs two nonempty samples")
    return ks_counts_statistic(x, y) / (x.size * y.size)


def ks_p_value(statistic: float, n: int, m: int) -> float:
    """Asymptotic two-sample KS p-value with effective size nm/(n+m)."""
    ne = n * m / (n + m)
    return kolmogorov_sf(math.sqrt(ne) * statistic)


@dataclass
class PermutationPlan:
    """Settings for ``permutation_p_value``.

    ``exact=None`` selects full enumeration automatically whenever the number
    of distinct group splits is at most ``exact_threshold``.
    """

    n_permutations: int = 1000
    seed: int = 0
    exact: bool | None = None
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD
    statistic: str = field(default="")

    def __post_init__(self):
        check_positive_int("n_permutations", self.n_permutations)
        check_positive_int("exact_threshold", self.exact_threshold)

    def use_exact(self, n: int, m: int) -> bool:
        splits = math.comb(n + m, n)
        if self.exact is None:
            return splits <= self.exact_threshold
        if self.exact and splits > self.exact_threshold:
            raise ValueError(
                f"exact enumeration needs {splits} splits, above the threshold "
                f"{self.exact_threshold}"
            )
        return bool(self.exact)


@dataclass
class PermutationResult:
    p_value: float
    observed: float
    exact: bool
    n_evaluated: int


def _at_least(values, observed):
    # absorb last-bit differences between algebraically equal statistics
    tol = 1e-12 * max(1.0, abs(observed))
    return values >= observed - tol


def permutation_test(plan: PermutationPlan, X, Y, statistic_fn) -> PermutationResult:
    """Permutation test of ``statistic_fn(X, Y)``; larger is more extreme.

    Exact mode enumerates every assignment of the pooled rows to a group of
    size ``len(X)`` and returns the proportion whose statistic is at least the
    observed one. Monte-Carlo mode returns
    ``(1 + #{permuted >= observed}) / (1 + n_permutations)``.
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    n, m = len(X), len(Y)
    if n == 0 or m == 0:
        raise ValueError("permutation test needs two nonempty samples")
    pooled = np.concatenate([X, Y], axis=0)
    observed = float(statistic_fn(X, Y))
    total = n + m
    if plan.use_exact(n, m):
        stats = []
        mask = np.zeros(total, dtype=bool)
        for idx in itertools.combinations(range(total), n):
            mask[:] = False
            mask[list(idx)] = True
            stats.append(statistic_fn(pooled[mask], pooled[~mask]))
        stats = np.asarray(stats, dtype=np.float64)
        hits = int(np.count_nonzero(_at_least(stats, observed)))
        return PermutationResult(hits / stats.size, observed, True, stats.size)
    rng = np.random.default_rng(plan.seed)
    stats = np.empty(plan.n_permutations)
    for i in range(plan.n_permutations):
        perm = rng.permutation(total)
        stats[i] = statistic_fn(pooled[perm[:n]], pooled[perm[n:]])
    hits = int(np.count_nonzero(_at_least(stats, observed)))
    return PermutationResult(
        (1 + hits) / (1 + plan.n_permutations), observed, False, plan.n_permutations
    )


def permutation_p_value(plan: PermutationPlan, X, Y, statistic_fn) -> float:
    return permutation_test(plan, X, Y, statistic_fn).p_value
