"""Callbacks specific to batch data drift detectors."""

from __future__ import annotations

from driftkit.core import Callback
from driftkit.data_drift.base import stack_columns
from driftkit.numerics import PermutationPlan, permutation_test
from driftkit.validation import check_interval


class PermutationTestCallback(Callback):
    """Attach a permutation p-value to every comparison.

    The test sample is captured on ``on_compare_start``; on
    ``on_compare_end`` the detector's statistic is recomputed over
    relabelings of the pooled reference and test rows. The p-value is stored
    in ``result.extras["permutation_p_value"]``, becomes ``result.p_value``
    when the detector produced none, and decides ``result.drift``
    (``p < alpha``) when the detector left it undecided.

    Parameters
    ----------
    n_permutations : int, default=1000
    random_state : int, default=0
    exact : bool or None, default=None
        Force (``True``) or forbid (``False``) full enumeration; ``None``
        enumerates whenever there are at most ``exact_threshold`` splits.
    alpha : float, default=0.05
    """

    def __init__(self, n_permutations=1000, random_state=0, exact=None, alpha=0.05,
                 exact_threshold=20_000):
        super().__init__()
        check_interval("alpha", alpha, 0.0, 1.0)
        self.plan = PermutationPlan(
            n_permutations=n_permutations,
            seed=random_state,
            exact=exact,
            exact_threshold=exact_threshold,
        )
        self.alpha = alpha
        self._test = None

    def reset(self):
        self.logs = []
        self._test = None

    def on_compare_start(self, detector, payload):
        self._test = payload["X"]

    def on_compare_end(self, detector, payload):
        result = payload["result"]
        ref = stack_columns(detector.reference_.columns)
        test = stack_columns(self._test)
        outcome = permutation_test(self.plan, ref, test, detector.statistic)
        result.extras["permutation_p_value"] = outcome.p_value
        result.extras["permutation_exact"] = outcome.exact
        result.extras["permutation_count"] = outcome.n_evaluated
        if result.p_value is None:
            result.p_value = outcome.p_value
        if result.drift is None:
            result.drift = bool(outcome.p_value < self.alpha)
        self.logs.append({"statistic": result.statistic, "p_value": outcome.p_value})
        self._test = None
