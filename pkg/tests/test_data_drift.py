import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ecdf_ks, exact_permutation_p
from driftkit import (
    EMD,
    MMD,
    PSI,
    AndersonDarlingTest,
    BhattacharyyaDistance,
    ChiSquareTest,
    CVMTest,
    HellingerDistance,
    HistogramIntersection,
    IncrementalKS,
    JSDivergence,
    KLDivergence,
    KSTest,
    MannWhitneyUTest,
    MultivariateMarginals,
    NotFittedError,
    PermutationTestCallback,
    WelchTTest,
)
from driftkit.data_drift.distances import mmd_squared
from driftkit.data_drift.statistical_tests import (
    anderson_darling_statistic,
    cvm_statistic,
    mann_whitney_u,
)
from driftkit.registry import BATCH_DATA_DRIFT_METHODS

HISTOGRAM_DISTANCES = [
    HellingerDistance,
    BhattacharyyaDistance,
    KLDivergence,
    JSDivergence,
    PSI,
    HistogramIntersection,
]
GOLDEN_REF = [0.0] * 5 + [1.0] * 5  # p = [0.5, 0.5]
GOLDEN_TEST = [0.0] * 9 + [1.0]  # q = [0.9, 0.1]


def as_arrays(statistic):
    return lambda a, b: statistic(np.asarray(a, float), np.asarray(b, float))


def run(detector, ref, test):
    return detector.fit(np.asarray(ref)).compare(np.asarray(test))


# fit / compare lifecycle

@pytest.mark.parametrize("name", sorted(BATCH_DATA_DRIFT_METHODS))
def test_compare_before_fit(name):
    with pytest.raises(NotFittedError):
        BATCH_DATA_DRIFT_METHODS[name]().compare(np.arange(5.0))


@pytest.mark.parametrize("name", sorted(BATCH_DATA_DRIFT_METHODS))
def test_compare_is_read_only_and_repeatable(name):
    rng = np.random.default_rng(0)
    d = BATCH_DATA_DRIFT_METHODS[name]()
    ref, test = rng.normal(size=40), rng.normal(0.5, 1, size=30)
    d.fit(ref)
    stored = d.reference_.columns[0].copy()
    a, b = d.compare(test), d.compare(test)
    assert a.to_dict() == b.to_dict()
    np.testing.assert_array_equal(d.reference_.columns[0], stored)
    # fitting on the reference itself is legal
    assert d.compare(ref).statistic == pytest.approx(0.0, abs=1e-9) or name in (
        "mann_whitney_u", "anderson_darling", "cvm"
    )


def test_refit_replaces_reference():
    d = KSTest().fit(np.arange(10.0))
    d.fit(np.arange(100.0, 103.0))
    assert d.reference_.n_samples == 3
    assert d.compare(np.arange(100.0, 103.0)).statistic == 0.0


def test_fit_rejects_bad_reference():
    with pytest.raises(ValueError):
        KSTest().fit(np.array([]))
    with pytest.raises(ValueError):
        KSTest().fit(np.array([1.0, math.nan]))
    with pytest.raises(ValueError):
        KSTest().fit(np.ones((5, 2)))


def test_kind_mismatch_rejected_at_compare():
    d = ChiSquareTest().fit(np.array(["a", "b"], dtype=object))
    with pytest.raises(ValueError):
        d.compare(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        KSTest().fit(np.array(["a", "b"], dtype=object))


def test_statistical_tests_always_carry_p_value():
    rng = np.random.default_rng(1)
    for cls in (KSTest, CVMTest, AndersonDarlingTest, MannWhitneyUTest, WelchTTest, ChiSquareTest):
        res = run(cls(), rng.integers(0, 4, 30).astype(float), rng.integers(0, 4, 20).astype(float))
        assert res.p_value is not None and 0 <= res.p_value <= 1


# KS

def test_ks_examples():
    res = run(KSTest(), [1, 2, 3], [1, 2, 3])
    assert res.statistic == 0 and res.p_value == 1
    assert run(KSTest(), [1, 2, 3, 4], [5, 6, 7, 8]).statistic == 1
    assert run(KSTest(), [1, 3, 5], [2, 4, 6]).statistic == 1 / 3


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=30),
       st.lists(st.integers(-20, 20), min_size=1, max_size=30))
def test_ks_matches_fraction_oracle(x, y):
    got = run(KSTest(), np.asarray(x, float), np.asarray(y, float)).statistic
    assert got == float(ecdf_ks(x, y))


# CvM

def test_cvm_hand_case_and_exact_p():
    res = run(CVMTest(), [1, 3], [2, 4])
    assert res.statistic == pytest.approx(0.125, abs=1e-15)
    oracle = exact_permutation_p([1.0, 3.0], [2.0, 4.0], as_arrays(cvm_statistic))
    assert res.extras["exact"] and res.p_value == oracle


# Anderson-Darling

def test_ad_hand_case():
    assert run(AndersonDarlingTest(), [1, 3], [2, 4]).statistic == pytest.approx(8 / 3, abs=1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_ad_exact_p_small_samples(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 6, rng.integers(1, 6)).astype(float)
    y = rng.integers(0, 6, rng.integers(1, 6)).astype(float)
    if np.unique(np.r_[x, y]).size < 2:
        return
    res = run(AndersonDarlingTest(), x, y)
    assert res.extras["exact"]
    assert res.p_value == pytest.approx(
        exact_permutation_p(x, y, as_arrays(anderson_darling_statistic)), abs=1e-12
    )


def test_ad_asymptotic_option():
    rng = np.random.default_rng(2)
    res = run(AndersonDarlingTest(p_value_method="asymptotic"), rng.normal(size=200),
              rng.normal(0.3, 1, size=150))
    assert 0.001 <= res.p_value <= 0.25
    assert "standardized" in res.extras


# Mann-Whitney

def test_mwu_extreme_and_symmetric():
    assert run(MannWhitneyUTest(), [1, 2], [3, 4]).statistic == 0
    res = run(MannWhitneyUTest(), [1, 5, 9, 13], [1, 5, 9, 13])
    assert res.statistic == 8 and res.p_value == 1
    assert res.extras["z"] == 0


def test_mwu_ties_by_pair_counting():
    ref, test = [1, 2, 2], [2, 3]
    pairs = sum((a > b) + 0.5 * (a == b) for a in ref for b in test)
    assert run(MannWhitneyUTest(), ref, test).statistic == pairs


@given(st.lists(st.integers(0, 6), min_size=1, max_size=15),
       st.lists(st.integers(0, 6), min_size=1, max_size=15))
def test_mwu_pair_counting_property(ref, test):
    pairs = sum((a > b) + 0.5 * (a == b) for a in ref for b in test)
    u, _, p = mann_whitney_u(np.asarray(ref, float), np.asarray(test, float))
    assert u == pairs and 0 <= p <= 1


# Welch

def test_welch_examples():
    res = run(WelchTTest(), [1, 2, 3, 4], [1, 2, 3, 4])
    assert res.statistic == 0 and res.p_value == 1
    res = run(WelchTTest(), [1, 2, 3, 4], [3, 4, 5, 6])
    assert res.statistic == pytest.approx(-2.1909, abs=1e-4)
    assert res.extras["df"] == pytest.approx(6.0)
    assert res.p_value == pytest.approx(0.0707, abs=1e-3)


def test_welch_degenerate():
    same = run(WelchTTest(), [2, 2, 2], [2, 2])
    assert same.p_value == 1 and same.extras["degenerate"]
    apart = run(WelchTTest(), [2, 2, 2], [3, 3])
    assert apart.p_value == 0 and apart.extras["degenerate"] and apart.drift


# chi-squared

def test_chi2_examples():
    ref = np.array(["A"] * 10 + ["B"] * 20, dtype=object)
    test = np.array(["A"] * 20 + ["B"] * 10, dtype=object)
    res = run(ChiSquareTest(), ref, test)
    assert res.statistic == pytest.approx(20 / 3, abs=1e-12)
    assert res.extras["df"] == 1
    assert res.p_value == pytest.approx(0.00982, abs=1e-4)
    same = run(ChiSquareTest(), ref, ref)
    assert same.statistic == 0 and same.p_value == 1


def test_chi2_new_category_in_test():
    ref = np.array(["a", "b"] * 10, dtype=object)
    test = np.array(["a", "b", "c"] * 5, dtype=object)
    res = run(ChiSquareTest(), ref, test)
    assert res.extras["n_categories"] == 3 and math.isfinite(res.statistic)


def test_label_drift_uses_the_same_detectors():
    labels_ref = np.array([0, 1, 1, 0, 1] * 20)
    labels_test = np.array([1, 1, 1, 1, 0] * 20)
    assert run(ChiSquareTest(), labels_ref, labels_test).p_value < 0.05
    assert run(PSI(), labels_ref, labels_test).statistic > 0


# histogram distances

def test_distance_goldens():
    got = {cls.__name__: run(cls(bins=2), GOLDEN_REF, GOLDEN_TEST).statistic
           for cls in HISTOGRAM_DISTANCES}
    assert got["HellingerDistance"] == pytest.approx(0.32492, abs=1e-4)
    assert got["BhattacharyyaDistance"] == pytest.approx(0.11157, abs=1e-4)
    assert got["KLDivergence"] == pytest.approx(0.51083, abs=1e-4)
    assert got["PSI"] == pytest.approx(0.87889, abs=1e-4)
    assert got["HistogramIntersection"] == pytest.approx(0.4, abs=1e-9)


@pytest.mark.parametrize("cls", HISTOGRAM_DISTANCES)
def test_distance_identity(cls):
    x = np.random.default_rng(3).normal(size=300)
    res = run(cls(), x, x)
    assert abs(res.statistic) <= 1e-9
    assert res.p_value is None and res.drift is None


def test_disjoint_support():
    ref, test = [0.0] * 10 + [1.0] * 10, [1.0] * 20
    ref_cat = np.array(["a"] * 10, dtype=object)
    test_cat = np.array(["b"] * 10, dtype=object)
    assert run(HellingerDistance(), ref_cat, test_cat).statistic == pytest.approx(1.0)
    assert run(HistogramIntersection(), ref_cat, test_cat).statistic == pytest.approx(1.0)
    kl = run(KLDivergence(), ref_cat, test_cat)
    assert kl.extras["saturated"] and math.isfinite(kl.statistic) and kl.statistic > 10
    assert run(KLDivergence(bins=2), ref, test).extras["direction"]


def test_distance_threshold_decides():
    res = run(HellingerDistance(bins=2, threshold=0.3), GOLDEN_REF, GOLDEN_TEST)
    assert res.drift is True
    res = run(HellingerDistance(bins=2, threshold=0.4), GOLDEN_REF, GOLDEN_TEST)
    assert res.drift is False


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=40),
       st.lists(st.floats(-100, 100), min_size=1, max_size=40),
       st.integers(2, 12))
def test_distance_bounds(ref, test, k):
    values = {cls: run(cls(bins=k), ref, test).statistic for cls in HISTOGRAM_DISTANCES}
    assert all(v >= -1e-12 for v in values.values())
    assert values[HellingerDistance] <= 1 + 1e-12
    assert values[HistogramIntersection] <= 1 + 1e-12
    assert values[JSDivergence] <= math.log(2) + 1e-12


# EMD

def test_emd_examples():
    assert run(EMD(), [0, 1], [1, 2]).statistic == 1.0
    assert run(EMD(), [3, 1, 2], [3, 1, 2]).statistic == 0.0


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=30), st.integers(-40, 40))
def test_emd_shift(x, c):
    x = np.asarray(x, dtype=float)
    assert run(EMD(), x, x + c).statistic == pytest.approx(abs(c), abs=1e-9)


# MMD

def test_mmd_examples():
    x = np.random.default_rng(4).normal(size=(20, 3))
    assert abs(run(MMD(), x, x).statistic) <= 1e-12
    assert run(MMD(sigma=1.0), [0.0], [1.0]).statistic == pytest.approx(
        2 - 2 * math.exp(-0.5), abs=1e-12
    )


def test_mmd_triple_loop_oracle():
    rng = np.random.default_rng(5)
    X, Y = rng.normal(size=(50, 2)), rng.normal(0.5, 1, size=(50, 2))
    sigma = 1.3

    def k(a, b):
        return math.exp(-float(np.sum((a - b) ** 2)) / (2 * sigma**2))

    xx = sum(k(a, b) for a in X for b in X) / 2500
    yy = sum(k(a, b) for a in Y for b in Y) / 2500
    xy = sum(k(a, b) for a in X for b in Y) / 2500
    assert mmd_squared(X, Y, sigma) == pytest.approx(xx + yy - 2 * xy, abs=1e-9)
    assert run(MMD(sigma=sigma), X, Y).statistic == pytest.approx(xx + yy - 2 * xy, abs=1e-9)


def test_mmd_median_heuristic_and_unbiased():
    rng = np.random.default_rng(6)
    X, Y = rng.normal(size=(30, 2)), rng.normal(size=(30, 2))
    res = run(MMD(), X, Y)
    assert res.extras["sigma"] > 0
    assert run(MMD(unbiased=True), X, Y).statistic < res.statistic


# permutation callback

def test_permutation_callback_exact_oracle():
    cb = PermutationTestCallback(exact=True)
    res = run(EMD(callbacks=[cb]), [1.0, 2.0], [3.0, 4.0])
    assert res.extras["permutation_exact"]
    expected = exact_permutation_p([1.0, 2.0], [3.0, 4.0], lambda a, b: EMD().statistic(a, b))
    assert res.extras["permutation_p_value"] == pytest.approx(expected)
    assert res.p_value == res.extras["permutation_p_value"]
    assert res.drift is False


def test_permutation_callback_keeps_test_p_value():
    cb = PermutationTestCallback(n_permutations=200, exact=False)
    res = run(KSTest(callbacks=[cb]), np.arange(20.0), np.arange(10.0, 30.0))
    assert res.p_value != res.extras["permutation_p_value"]


def test_permutation_callback_mmd_multivariate():
    rng = np.random.default_rng(7)
    cb = PermutationTestCallback(n_permutations=100, random_state=1)
    res = run(MMD(callbacks=[cb]), rng.normal(size=(30, 2)), rng.normal(2, 1, size=(30, 2)))
    assert res.p_value == pytest.approx(1 / 101)
    assert res.drift


# rank invariance

rank_samples = st.lists(st.integers(-30, 30), min_size=1, max_size=25)
transforms = st.sampled_from([
    lambda v: v**3 + 2 * v,
    lambda v: np.exp(v / 8.0),
    lambda v: 1000.0 * v + 7.0,
    np.arctan,
])


@given(rank_samples, rank_samples, transforms)
def test_rank_statistics_invariant(x, y, f):
    x, y = np.asarray(x, float), np.asarray(y, float)
    fx, fy = f(x), f(y)
    for cls in (KSTest, CVMTest, AndersonDarlingTest, MannWhitneyUTest):
        d = cls()
        assert d.statistic(x, y) == d.statistic(fx, fy)


# incremental KS

def test_incremental_ks_window_equal_reference():
    ref = np.random.default_rng(8).normal(size=50)
    d = IncrementalKS().fit(ref)
    d.update_many(ref.tolist())
    assert d.compare().statistic == 0.0


def test_incremental_ks_matches_batch():
    rng = np.random.default_rng(9)
    ref = np.round(rng.normal(size=150), 1)
    d = IncrementalKS(window_size=80).fit(ref)
    batch = KSTest().fit(ref)
    stream = np.round(rng.normal(0.2, 1.2, size=3000), 1)
    for i, v in enumerate(stream.tolist()):
        got = d.update(v)
        window = stream[max(0, i - 79): i + 1]
        expected = batch.compare(window)
        assert got.statistic == expected.statistic
        assert got.p_value == expected.p_value


def test_incremental_ks_detects_shift():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        d = IncrementalKS().fit(rng.normal(size=100))
        stream = np.r_[rng.normal(size=200), rng.normal(2, 1, size=200)]
        results = d.update_many(stream.tolist())
        post = [i for i, r in enumerate(results) if r.drift and i >= 200]
        hits += bool(post) and post[0] < 400
    assert hits >= 95


# multivariate marginals

def test_marginals_single_feature_matches_univariate():
    rng = np.random.default_rng(10)
    ref, test = rng.normal(size=60), rng.normal(0.4, 1, size=50)
    single = run(KSTest(), ref, test)
    wrapped = MultivariateMarginals(KSTest()).fit(ref).compare(test)
    assert (wrapped.statistic, wrapped.p_value, wrapped.drift) == (
        single.statistic, single.p_value, single.drift
    )


def test_marginals_bonferroni_threshold():
    m = MultivariateMarginals(KSTest(), correction="bonferroni", alpha=0.05)
    m.fit(np.random.default_rng(0).normal(size=(30, 10)))
    assert m.feature_threshold() == pytest.approx(0.005)


def test_marginals_flag_shifted_feature():
    exact = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        ref = rng.normal(size=(300, 6))
        test = rng.normal(size=(300, 6))
        test[:, 4] += 1.0
        m = MultivariateMarginals(KSTest(), correction="bonferroni").fit(ref)
        res = m.compare(test)
        flags = [r.drift for r in res.breakdown]
        exact += res.drift and flags == [False] * 4 + [True, False]
    assert exact >= 95


def test_marginals_with_distances():
    rng = np.random.default_rng(11)
    ref, test = rng.normal(size=(100, 2)), rng.normal(size=(100, 2))
    test[:, 1] += 3
    res = MultivariateMarginals(HellingerDistance(threshold=0.5)).fit(ref).compare(test)
    assert res.p_value is None and res.extras["most_significant_feature"] == 1
    assert [r.drift for r in res.breakdown] == [False, True]
