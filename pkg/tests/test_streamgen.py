import math

import numpy as np
import pytest
from scipy import stats

from driftkit import ADWIN, DDM, HDDM_A, KSTest
from driftkit.streamgen import (
    DriftScenario,
    bernoulli_error_stream,
    evaluate,
    gaussian_stream,
    new_concept_probability,
)


def test_stationary_bernoulli_rate():
    x = bernoulli_error_stream(0.3, 0.3, 500, 0, 5000, seed=1)
    sigma = math.sqrt(0.3 * 0.7 / 5000)
    assert abs(x.mean() - 0.3) <= 3 * sigma
    assert set(np.unique(x)) <= {0, 1}


def test_abrupt_change_is_exact_step():
    assert np.array_equal(new_concept_probability(10, 4, 0), [0, 0, 0, 0, 1, 1, 1, 1, 1, 1])
    x = bernoulli_error_stream(0.0, 1.0, 700, 0, 1000, seed=3)
    assert x[:700].sum() == 0 and x[700:].all()


def test_gradual_mixing_follows_sigmoid():
    prob = new_concept_probability(300, 100, 100)
    assert prob[99] == 0 and prob[100] == pytest.approx(0.5) and prob[200] == 1
    i = np.arange(100, 200)
    np.testing.assert_allclose(prob[100:200], 1 / (1 + np.exp(-4 * (i - 100) / 100)))
    x = bernoulli_error_stream(0.0, 1.0, 100, 100, 300, seed=0)
    assert x[:100].sum() == 0 and x[200:].all() and 0 < x[100:200].sum() < 100


def test_bernoulli_segment_bands():
    x = bernoulli_error_stream(0.1, 0.5, 1000, 0, 2000, seed=7)
    for seg, p in ((x[:1000], 0.1), (x[1000:], 0.5)):
        lo, hi = stats.binom.interval(0.99, seg.size, p)
        assert lo <= seg.sum() <= hi


def test_gaussian_streams():
    same = gaussian_stream(1, 2, 1, 2, 100, 0, 4000, seed=0)
    half = 2000
    assert abs(same[:half].mean() - same[half:].mean()) < 6 * 2 / math.sqrt(half)
    x = gaussian_stream(0, 1, 5, 2, 3000, 0, 6000, seed=4)
    pre, post = x[:3000], x[3000:]
    assert abs(pre.mean()) < 4 / math.sqrt(3000)
    assert abs(post.mean() - 5) < 4 * 2 / math.sqrt(3000)
    lo, hi = stats.chi2.interval(0.999, 2999)
    assert lo / 2999 <= pre.var(ddof=1) <= hi / 2999
    assert lo / 2999 <= post.var(ddof=1) / 4 <= hi / 2999


def test_streams_are_deterministic_per_seed():
    a = bernoulli_error_stream(0.2, 0.6, 50, 10, 200, seed=11)
    b = bernoulli_error_stream(0.2, 0.6, 50, 10, 200, seed=11)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != bernoulli_error_stream(0.2, 0.6, 50, 10, 200, seed=12).tobytes()


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(p0=1.5, p1=0.1, t0=10, width=0, n=100, seed=0),
        dict(p0=0.1, p1=0.1, t0=100, width=0, n=100, seed=0),
        dict(p0=0.1, p1=0.1, t0=10, width=-1, n=100, seed=0),
        dict(p0=0.1, p1=0.1, t0=10, width=0, n=100, seed=-3),
    ],
)
def test_invalid_bernoulli_arguments(kwargs):
    with pytest.raises(ValueError):
        bernoulli_error_stream(**kwargs)


def test_scenario_round_trip_and_validation():
    sc = DriftScenario("gaussian", {"mu": 0, "sigma": 1}, {"mu": 1, "sigma": 1}, 50, 100, 10)
    assert DriftScenario.from_dict(sc.to_dict()) == sc
    with pytest.raises(ValueError):
        DriftScenario.from_dict({**sc.to_dict(), "colour": "red"})
    with pytest.raises(ValueError):
        DriftScenario("bernoulli", {"p": 0.1}, {"mu": 1}, 5, 10)
    with pytest.raises(ValueError):
        DriftScenario("poisson", {}, {}, 5, 10)


def test_evaluate_is_deterministic_and_leaves_scenario_alone():
    sc = DriftScenario("bernoulli", {"p": 0.1}, {"p": 0.5}, 1000, 2000)
    before = sc.to_dict()
    a = evaluate(HDDM_A(), sc, range(10))
    b = evaluate(HDDM_A(), sc, range(10))
    assert a.to_dict() == b.to_dict()
    assert sc.to_dict() == before


def test_evaluate_order_independent():
    sc = DriftScenario("bernoulli", {"p": 0.1}, {"p": 0.5}, 300, 600)
    forward = evaluate(ADWIN(), sc, [1, 2, 3])
    backward = evaluate(ADWIN(), sc, [3, 2, 1])
    assert forward.records == backward.records[::-1]


def test_evaluate_rejects_domain_mismatch():
    sc = DriftScenario("gaussian", {"mu": 0, "sigma": 1}, {"mu": 1, "sigma": 1}, 50, 100)
    with pytest.raises(ValueError):
        evaluate(DDM(), sc, [0])
    with pytest.raises(TypeError):
        evaluate(KSTest(), sc, [0])


def test_evaluate_without_errors_never_alarms():
    sc = DriftScenario("bernoulli", {"p": 0.0}, {"p": 0.0}, 500, 1000)
    report = evaluate(DDM(), sc, range(100))
    assert report.detection_rate == 0 and report.false_alarm_rate == 0


def test_evaluate_stationary_noisy_stream():
    sc = DriftScenario("bernoulli", {"p": 0.1}, {"p": 0.1}, 1000, 2000)
    report = evaluate(DDM(), sc, range(100))
    assert report.false_alarm_rate < 0.05


def test_evaluate_ddm_acceptance_numbers():
    sc = DriftScenario("bernoulli", {"p": 0.1}, {"p": 0.5}, 1000, 2000)
    report = evaluate(DDM(), sc, range(100))
    assert report.detection_rate >= 0.95
    assert report.median_delay <= 300
    for r in report.records:
        assert r.delay is None or r.delay >= 0
        assert r.false_alarms == sum(s < 1000 for s in r.drift_steps)
