import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_stream
from oracles import ExhaustiveADWIN
from driftkit import (
    ADWIN,
    BOCD,
    CUSUM,
    DDM,
    ECDD,
    EDDM,
    GMA,
    HDDM_A,
    HDDM_W,
    KSWIN,
    RDDM,
    STEPD,
    PageHinkley,
)
from driftkit.concept_drift import StreamStats
from driftkit.concept_drift.adwin import adwin_cut_threshold
from driftkit.concept_drift.ecdd import control_limit
from driftkit.concept_drift.hddm import hoeffding_bound
from driftkit.concept_drift.windows import stepd_p_value
from driftkit.numerics import ks_statistic, normal_sf
from driftkit.registry import CONCEPT_DRIFT_METHODS
from driftkit.snapshot import to_dict
from driftkit.streamgen import bernoulli_error_stream, gaussian_stream

SEEDS = range(100)


def first_drift(statuses, start=0):
    for i, s in enumerate(statuses):
        if s.drift and i >= start:
            return i
    return None


def drift_steps(statuses):
    return [i for i, s in enumerate(statuses) if s.drift]


# shared contracts

@pytest.mark.parametrize("name", sorted(CONCEPT_DRIFT_METHODS))
@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_rejects_non_finite_without_state_change(name, bad):
    d = CONCEPT_DRIFT_METHODS[name]()
    d.update_many(make_stream(d, 0, 50))
    before = to_dict(d)
    with pytest.raises(ValueError):
        d.update(bad)
    assert to_dict(d) == before


@pytest.mark.parametrize("cls", [DDM, EDDM, RDDM, ECDD, STEPD])
@pytest.mark.parametrize("bad", [2, -1, 0.5])
def test_binary_detectors_reject_out_of_domain(cls, bad):
    d = cls()
    d.update_many([0, 1, 0])
    before = to_dict(d)
    with pytest.raises(ValueError):
        d.update(bad)
    assert to_dict(d) == before


@pytest.mark.parametrize("cls", [HDDM_A, HDDM_W])
def test_hoeffding_detectors_reject_outside_unit_interval(cls):
    d = cls()
    with pytest.raises(ValueError):
        d.update(1.5)
    assert to_dict(d) == to_dict(cls())


@pytest.mark.slow
@pytest.mark.parametrize("cls, value", [(DDM, 0), (EDDM, 0), (RDDM, 0), (ECDD, 0), (STEPD, 1)])
def test_perfect_classifier_never_signals(cls, value):
    statuses = cls().update_many([value] * 100_000)
    assert not any(s.drift or s.warning for s in statuses)


def test_welford_matches_two_pass():
    x = np.random.default_rng(4).standard_normal(10_000)
    s = StreamStats()
    for v in x:
        s.update(v)
    assert s.mean == pytest.approx(x.mean(), rel=1e-9)
    assert s.variance == pytest.approx(x.var(ddof=1), rel=1e-9)
    assert s.variance >= 0


@pytest.mark.parametrize(
    "cls, params",
    [
        (DDM, {"drift_level": 1.0}),
        (EDDM, {"warning_level": 1.5}),
        (RDDM, {"min_num_instances": 0}),
        (ECDD, {"arl0": 250}),
        (CUSUM, {"threshold": -1}),
        (GMA, {"weight": 0}),
        (PageHinkley, {"delta": math.nan}),
        (ADWIN, {"delta": 1.5}),
        (BOCD, {"hazard": 0}),
        (KSWIN, {"stat_size": 60}),
        (STEPD, {"alpha_drift": 0.1}),
        (HDDM_A, {"drift_confidence": 0.01}),
        (HDDM_W, {"weight": 2}),
    ],
)
def test_bad_parameters_rejected(cls, params):
    with pytest.raises((TypeError, ValueError)):
        cls(**params)
    d = cls()
    with pytest.raises((TypeError, ValueError)):
        d.set_params(**params)


# DDM

def test_ddm_all_zero_never_signals():
    assert not any(s.drift or s.warning for s in DDM().update_many([0] * 10_000))


def test_ddm_first_error_after_clean_prefix():
    statuses = DDM().update_many([0] * 30 + [1])
    assert first_drift(statuses) == 30  # sample 31


def test_ddm_abrupt_error_rate_change():
    hits = 0
    for seed in SEEDS:
        x = bernoulli_error_stream(0.1, 0.5, 1000, 0, 2000, seed).tolist()
        step = first_drift(DDM().update_many(x), start=1000)
        hits += step is not None and 1000 <= step < 1300
    assert hits >= 95


# EDDM

def test_eddm_needs_thirty_errors():
    x = ([0] * 50 + [1]) * 29 + [0] * 2000
    assert not any(s.drift or s.warning for s in EDDM().update_many(x))


def test_eddm_constant_spacing_never_signals():
    x = ([0] * 9 + [1]) * 1000
    assert not any(s.drift or s.warning for s in EDDM().update_many(x))


def test_eddm_spacing_shrinks():
    x = ([0] * 9 + [1]) * 100 + ([0] + [1]) * 200
    statuses = EDDM().update_many(x)
    assert first_drift(statuses, start=1000) is not None
    assert first_drift(statuses) >= 1000


# RDDM

def test_rddm_all_zero():
    assert not any(s.drift or s.warning for s in RDDM().update_many([0] * 50_000))


@pytest.mark.parametrize("seed", range(20))
def test_rddm_matches_ddm_until_reaction(seed):
    # same thresholds as DDM; streams far shorter than the concept cap
    x = bernoulli_error_stream(0.1, 0.4, 800, 0, 1500, seed).tolist()
    ddm = DDM().update_many(x)
    rddm = RDDM(warning_level=2.0, drift_level=3.0, min_num_instances=30).update_many(x)
    stop = first_drift(ddm)
    stop = len(x) if stop is None else stop + 1
    assert rddm[:stop] == ddm[:stop]


@pytest.mark.slow
def test_rddm_reacts_faster_after_long_concept():
    faster = 0
    t0, n = 45_000, 47_000
    for seed in SEEDS:
        x = bernoulli_error_stream(0.1, 0.3, t0, 0, n, seed).tolist()
        d_ddm = first_drift(DDM().update_many(x), start=t0)
        d_rddm = first_drift(RDDM().update_many(x), start=t0)
        d_ddm = n if d_ddm is None else d_ddm
        d_rddm = n if d_rddm is None else d_rddm
        faster += d_rddm < d_ddm
    assert faster >= 80


# CUSUM

def test_cusum_constant_stream():
    d = CUSUM()
    assert not any(s.drift for s in d.update_many([2.5] * 500))
    assert d.g_pos_ == 0.0 and d.g_neg_ == 0.0


def test_cusum_hand_recurrence():
    d = CUSUM(delta=0.0, threshold=5.0, mean=0.0, std=1.0)
    g = []
    for _ in range(6):
        status = d.update(1.0)
        g.append(d.g_pos_)
    assert g == [1, 2, 3, 4, 5, 6]
    assert status.drift
    up = first_drift(CUSUM(delta=0.0, threshold=5.0, mean=0.0, std=1.0).update_many([1.0] * 10))
    assert up == 5


def test_cusum_two_sided_symmetry():
    x = np.random.default_rng(5).standard_normal(300)
    x[150:] += 2.0
    up = first_drift(CUSUM(threshold=10).update_many(x.tolist()))
    down = first_drift(CUSUM(threshold=10).update_many((-x).tolist()))
    assert up is not None and up == down


# Page-Hinkley

def test_page_hinkley_constant_stream():
    d = PageHinkley()
    assert not any(s.drift for s in d.update_many([1.0] * 5000))


def test_page_hinkley_mean_step():
    d = PageHinkley(delta=0.1, threshold=5.0)
    d.update_many([0.0] * 1000)
    statuses = d.update_many([1.0] * 20)
    assert first_drift(statuses) + 1 in range(5, 9)


def test_page_hinkley_replay_after_reset():
    x = np.r_[np.zeros(500), np.ones(100)].tolist()
    d = PageHinkley(delta=0.1, threshold=5.0)
    a = first_drift(d.update_many(x))
    d.reset()
    assert first_drift(d.update_many(x)) == a


# GMA

def test_gma_unit_weight_tracks_input():
    d = GMA(weight=1.0)
    x = np.random.default_rng(6).standard_normal(60)
    for i, v in enumerate(x):
        d.update(v)
        if i >= 30:
            assert d.ewma_ == v


def test_gma_constant_stream():
    d = GMA()
    assert not any(s.drift for s in d.update_many([4.0] * 300))


def test_gma_mean_shift():
    hits = 0
    for seed in SEEDS:
        # the 30-sample warm-up is followed directly by the shift
        x = gaussian_stream(0, 1, 3, 1, 30, 0, 90, seed).tolist()
        step = first_drift(GMA().update_many(x), start=30)
        hits += step is not None and step < 40
    assert hits >= 95


# ECDD

def test_ecdd_all_zero():
    assert not any(s.drift or s.warning for s in ECDD().update_many([0] * 20_000))


def test_ecdd_control_limit_table():
    assert control_limit(400, 0.1) > 0
    with pytest.raises(ValueError):
        ECDD(arl0=500)


def test_ecdd_detects_step():
    delays = []
    for seed in SEEDS:
        x = bernoulli_error_stream(0.1, 0.4, 1000, 0, 2000, seed).tolist()
        step = first_drift(ECDD().update_many(x), start=1000)
        delays.append(2000 if step is None else step - 1000)
    assert np.median(delays) < 100


# HDDM

def test_hoeffding_bound_hand_value():
    assert hoeffding_bound(100, 0.001) == pytest.approx(0.18585, abs=1e-5)
    assert hoeffding_bound(100, 0.001) == pytest.approx(math.sqrt(math.log(1000) / 200))


@pytest.mark.parametrize("cls", [HDDM_A, HDDM_W])
def test_hddm_constant_stream(cls):
    assert not any(s.drift or s.warning for s in cls().update_many([0.3] * 2000))


def test_hddm_a_step():
    hits = 0
    for seed in SEEDS:
        x = bernoulli_error_stream(0.1, 0.5, 500, 0, 1000, seed).tolist()
        step = first_drift(HDDM_A().update_many(x), start=500)
        hits += step is not None and step < 700
    assert hits >= 95


def test_hddm_w_weighted_mean_direct_sum():
    lam = 0.05
    x = np.random.default_rng(8).random(20)
    d = HDDM_W(weight=lam)
    d.update_many(x.tolist())
    w = np.array([(1 - lam) ** 19] + [lam * (1 - lam) ** (20 - i) for i in range(2, 21)])
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert d.total_.estimate == pytest.approx(float(w @ x), abs=1e-12)
    assert d.total_.weight_sq == pytest.approx(float(w @ w), abs=1e-12)


def test_hddm_w_reports_delays():
    # informational comparison, only sanity checked
    for cls in (HDDM_A, HDDM_W):
        x = bernoulli_error_stream(0.1, 0.5, 500, 0, 1500, 1).tolist()
        assert first_drift(cls().update_many(x), start=500) is not None


def test_hddm_two_sided_detects_decrease():
    x = np.r_[np.full(500, 0.8), np.full(500, 0.1)].tolist()
    assert first_drift(HDDM_A().update_many(x)) is None
    assert first_drift(HDDM_A(two_sided=True).update_many(x)) is not None


# KSWIN

def test_kswin_warm_up():
    d = KSWIN()
    d.update_many(np.random.default_rng(0).random(99).tolist())
    assert d.statistic_ is None


def test_kswin_statistic_matches_batch_ks():
    d = KSWIN(alpha=0.01)
    rng = np.random.default_rng(10)
    for v in rng.random(2000):
        d.update(v)
        if d.statistic_ is not None:
            assert d.statistic_ == ks_statistic(d.older_sample_, d.recent_sample_)


@pytest.mark.slow
def test_kswin_false_alarm_rate():
    # one test per fresh window, so each test is an independent draw
    d = KSWIN(alpha=0.01, random_state=3)
    windows = np.random.default_rng(11).random((10_000, 100))
    alarms = 0
    for row in windows:
        d.reset()
        alarms += d.update_many(row.tolist())[-1].drift
    rate = alarms / len(windows)
    assert 0.005 <= rate <= 0.02


# STEPD

def test_stepd_all_correct():
    assert not any(s.drift or s.warning for s in STEPD().update_many([1] * 5000))


def test_stepd_hand_case():
    p = stepd_p_value(873, 970, 15, 30)
    inv = 1 / 970 + 1 / 30
    pooled = 888 / 1000
    z = (0.9 - 0.5 - 0.5 * inv) / math.sqrt(pooled * (1 - pooled) * inv)
    assert p == pytest.approx(normal_sf(z), rel=1e-12)
    assert p < 0.003
    rng = np.random.default_rng(0)
    history = np.r_[np.ones(873), np.zeros(97)]
    rng.shuffle(history)
    stream = history.astype(int).tolist() + [1, 0] * 15
    statuses = STEPD().update_many(stream)
    assert first_drift(statuses, start=970) is not None


# ADWIN

def test_adwin_cut_threshold():
    d = math.log(2 * math.log(20) / 0.002)
    expected = math.sqrt(2 * 0.2 * 0.25 * d) + 2 / 3 * 0.2 * d
    assert adwin_cut_threshold(10, 10, 0.25, 0.002) == pytest.approx(expected)


def test_adwin_constant_stream():
    d = ADWIN(clock=1)
    assert not any(s.drift for s in d.update_many([0.7] * 3000))


def test_adwin_step():
    d = ADWIN(delta=0.002, clock=1)
    statuses = d.update_many([0.0] * 500 + [1.0] * 500)
    step = first_drift(statuses)
    assert step is not None and 500 <= step < 600
    assert d.estimation > 0.9


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(1, 1500))
def test_adwin_bucket_invariants(seed, length):
    d = ADWIN(clock=1)
    for v in np.random.default_rng(seed).random(length):
        d.update(v)
        counts = [b[2] for row in d.rows_ for b in row]
        assert sum(counts) == d.width_
        for i, row in enumerate(d.rows_):
            assert len(row) <= d.max_buckets
            assert all(b[2] == 2**i for b in row)


def test_adwin_matches_exhaustive_without_merging():
    # with no bucket merging every split is a bucket boundary
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = int(rng.integers(50, 400))
        x = rng.normal(0, 1, n)
        x[n // 2:] += rng.uniform(0, 3)
        bucketed = ADWIN(clock=1, max_buckets=512)
        oracle = ExhaustiveADWIN()
        got = [i for i, v in enumerate(x) if bucketed.update(v).drift]
        ref = [i for i, v in enumerate(x) if oracle.update(v)]
        assert got == ref


# BOCD

def test_bocd_first_split():
    d = BOCD(hazard=0.1)
    d.update(0.3)
    probs = dict(zip(d.run_lengths_.tolist(), d.probs_.tolist()))
    assert probs[0] == pytest.approx(0.1, abs=1e-12)
    assert probs[1] == pytest.approx(0.9, abs=1e-12)


def test_bocd_normalization():
    d = BOCD()
    x = np.random.default_rng(12).standard_normal(10_000)
    x[5000:] += 4
    for v in x:
        d.update(v)
        assert abs(d.probs_.sum() - 1) <= 1e-9
        assert d.pruned_mass_ <= 1e-6


def test_bocd_collapse():
    hits = 0
    for seed in SEEDS:
        x = gaussian_stream(0, 1, 5, 1, 300, 0, 320, seed).tolist()
        step = first_drift(BOCD().update_many(x), start=300)
        hits += step is not None and step < 320
    assert hits >= 95
