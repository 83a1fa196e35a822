import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from driftkit.registry import CONCEPT_DRIFT_METHODS

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "driftkit",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("driftkit")

CONCEPT_NAMES = sorted(CONCEPT_DRIFT_METHODS)


def make_stream(detector, seed, length, shift_at=None):
    """Random stream in the detector's input domain, optionally with a step."""
    rng = np.random.default_rng(seed)
    shift_at = length // 2 if shift_at is None else shift_at
    if detector._binary_input:
        p = np.where(np.arange(length) < shift_at, 0.15, 0.6)
        return (rng.random(length) < p).astype(int).tolist()
    name = type(detector).__name__
    if name in ("HDDM_A", "HDDM_W"):
        lo = rng.uniform(0.0, 0.4, length)
        hi = rng.uniform(0.5, 1.0, length)
        return np.where(np.arange(length) < shift_at, lo, hi).tolist()
    x = rng.standard_normal(length)
    x[shift_at:] += 3.0
    return x.tolist()


@pytest.fixture(params=CONCEPT_NAMES)
def concept_name(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
