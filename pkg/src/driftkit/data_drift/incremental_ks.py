"""Streaming Kolmogorov-Smirnov test over a sliding window (dos Reis et al., 2016)."""

from __future__ import annotations

import random
from collections import deque

import numpy as np

from driftkit.core import NO_SIGNAL, STREAMING, DetectionStatus
from driftkit.data_drift.base import BaseDataDrift, ComparisonResult
from driftkit.numerics import ks_counts_statistic, ks_p_value
from driftkit.validation import check_finite_value, check_interval, check_positive_int


class _Node:
    __slots__ = ("key", "weight", "priority", "left", "right", "total", "max_prefix",
                 "min_prefix")

    def __init__(self, key, priority):
        self.key = key
        self.weight = 0
        self.priority = priority
        self.left = None
        self.right = None
        self.total = 0
        self.max_prefix = 0
        self.min_prefix = 0


def _pull(node):
    """Recompute the subtree aggregates of ``node`` from its children.

    ``total`` is the sum of weights in the subtree; ``max_prefix`` and
    ``min_prefix`` are the extreme in-order prefix sums ending at any node of
    the subtree.
    """
    left, right = node.left, node.right
    lt = left.total if left else 0
    here = lt + node.weight
    hi = lo = here
    if left:
        hi = max(hi, left.max_prefix)
        lo = min(lo, left.min_prefix)
    if right:
        hi = max(hi, here + right.max_prefix)
        lo = min(lo, here + right.min_prefix)
        node.total = here + right.total
    else:
        node.total = here
    node.max_prefix = hi
    node.min_prefix = lo


class PrefixTreap:
    """Treap keyed by value holding integer weights with prefix-sum extremes.

    ``add(key, delta)`` changes the weight of ``key`` in O(log k) expected
    time; a key is removed once its live count in ``counts`` drops to zero. ``max_abs_prefix`` is the largest ``|sum of weights <= x|`` over
    stored keys, read from the root in O(1).
    """

    def __init__(self, seed=0):
        self._root = None
        self._rng = random.Random(seed)
        self.size = 0

    def add(self, key, delta, counts):
        """Add ``delta`` to the weight of ``key``; ``counts`` maps keys to live counts."""
        self._root = self._add(self._root, key, delta, counts)

    def _add(self, node, key, delta, counts):
        if node is None:
            node = _Node(key, self._rng.random())
            node.weight = delta
            self.size += 1
            _pull(node)
            return node
        if key == node.key:
            node.weight += delta
            if counts.get(key, 0) == 0:
                self.size -= 1
                return self._merge(node.left, node.right)
            _pull(node)
            return node
        if key < node.key:
            node.left = self._add(node.left, key, delta, counts)
            if node.left is not None and node.left.priority > node.priority:
                node = self._rotate_right(node)
        else:
            node.right = self._add(node.right, key, delta, counts)
            if node.right is not None and node.right.priority > node.priority:
                node = self._rotate_left(node)
        _pull(node)
        return node

    @staticmethod
    def _rotate_right(node):
        top = node.left
        node.left = top.right
        _pull(node)
        top.right = node
        return top

    @staticmethod
    def _rotate_left(node):
        top = node.right
        node.right = top.left
        _pull(node)
        top.left = node
        return top

    def _merge(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        if a.priority > b.priority:
            a.right = self._merge(a.right, b)
            _pull(a)
            return a
        b.left = self._merge(a, b.left)
        _pull(b)
        return b

    @property
    def max_abs_prefix(self):
        if self._root is None:
            return 0
        return max(self._root.max_prefix, -self._root.min_prefix)


class IncrementalKS(BaseDataDrift):
    """Exact KS statistic between the reference and a sliding test window.

    Every distinct value ``x`` carries the integer weight
    ``w * #ref(x) - n * #window(x)`` with ``n`` the reference size and ``w``
    the window size, so that ``n w D`` is the largest absolute in-order
    prefix sum. The values sit in a treap augmented with subtree sums and
    prefix extremes, which makes insertion, eviction and the statistic
    O(log) per update once the window is full. While the window fills, its
    size changes every step and the statistic is computed from sorted
    counts instead. Both routes use integer arithmetic and match the batch
    KS test exactly.

    Parameters
    ----------
    window_size : int, optional
        Test window length; defaults to the reference size.
    alpha : float, default=0.01
        Drift when the window is full and the asymptotic p-value is below
        ``alpha``.
    """

    method = "incremental_ks"
    _category = STREAMING

    def __init__(self, window_size=None, alpha=0.01, callbacks=None):
        self.window_size = window_size
        self.alpha = alpha
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        if self.window_size is not None:
            check_positive_int("window_size", self.window_size)
        check_interval("alpha", self.alpha, 0.0, 1.0)

    def fit(self, X, y=None):
        super().fit(X)
        ref = self.reference_.columns[0]
        self.window_capacity_ = self.window_size or ref.size
        self.window_ = deque()
        self.step_ = 0
        self.status_ = NO_SIGNAL
        self._build_tree()
        return self

    def _clear_state(self):
        super()._clear_state()
        self.__dict__.pop("_tree", None)

    def reset(self):
        self.__dict__.pop("_tree", None)
        return super().reset()

    def set_state(self, state):
        super().set_state(state)
        if hasattr(self, "reference_"):
            self._build_tree()
        return self

    def _build_tree(self):
        ref = np.sort(self.reference_.columns[0])
        n, w = ref.size, self.window_capacity_
        self._sorted_ref = ref
        self._counts = {}
        tree = PrefixTreap()
        for value in ref.tolist():
            self._counts[value] = self._counts.get(value, 0) + 1
            tree.add(value, w, self._counts)
        for value in self.window_:
            self._counts[value] = self._counts.get(value, 0) + 1
            tree.add(value, -n, self._counts)
        self._tree = tree

    def _check_value(self, value):
        return check_finite_value(value)

    def update(self, value) -> ComparisonResult:
        """Slide the window by one value and compare it with the reference."""
        value = self._check_value(value)
        self._check_fitted()
        if not hasattr(self, "_tree"):
            self._build_tree()
        step = self.step_ + 1
        self._dispatch("on_update_start", {"step": step, "value": value})
        n = self.reference_.n_samples
        if len(self.window_) == self.window_capacity_:
            old = self.window_.popleft()
            self._counts[old] -= 1
            self._tree.add(old, n, self._counts)
        self.window_.append(value)
        self._counts[value] = self._counts.get(value, 0) + 1
        self._tree.add(value, -n, self._counts)
        result = self._current_result()
        status = DetectionStatus(drift=bool(result.drift))
        self.step_ = step
        self.status_ = status
        payload = {"step": step, "value": value, "status": status, "result": result}
        self._dispatch("on_update_end", payload)
        if status.drift:
            self._dispatch("on_drift_detected", payload)
        return result

    def update_many(self, values):
        return [self.update(v) for v in values]

    def _current_result(self):
        n = self.reference_.n_samples
        m = len(self.window_)
        full = m == self.window_capacity_
        if full:
            scaled = self._tree.max_abs_prefix
        else:
            window = np.sort(np.fromiter(self.window_, dtype=np.float64, count=m))
            scaled = ks_counts_statistic(self._sorted_ref, window)
        statistic = scaled / (n * m)
        p_value = ks_p_value(statistic, n, m)
        return ComparisonResult(
            self.method,
            statistic,
            p_value,
            drift=bool(full and p_value < self.alpha),
            extras={"window_length": m, "window_full": full},
        )

    def compare(self, X=None) -> ComparisonResult:
        """Compare the reference with the current window (``X`` is ignored)."""
        self._check_fitted()
        if not self.window_:
            raise ValueError("the test window is empty")
        if not hasattr(self, "_tree"):
            self._build_tree()
        return self._current_result()

    @property
    def drift(self):
        return hasattr(self, "status_") and self.status_.drift

    def summary(self):
        if not hasattr(self, "window_"):
            return {}
        return {"window_length": len(self.window_)}

