"""Synthetic drifting streams and a detection-delay harness.

Streams change from a pre-change distribution to a post-change one at
position ``t0`` (0-based). With ``width=0`` the change is abrupt; otherwise,
for ``t0 <= i < t0 + width`` each value is drawn from the new distribution
with probability ``1 / (1 + exp(-4 (i - t0) / width))``, and from
``t0 + width`` on only the new distribution is used.

Each seed drives its own counter-based Philox generator keyed by the seed,
so a stream depends on its seed alone and adding seeds to an experiment
never changes the streams of the others.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass, field

import numpy as np

from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.validation import check_interval, check_positive_int

KINDS = ("bernoulli", "gaussian")


def seed_generator(seed):
    """Independent generator for ``seed`` (Philox keyed by the seed)."""
    check_positive_int("seed", seed, minimum=0)
    return np.random.Generator(np.random.Philox(key=seed))


def new_concept_probability(n, t0, width):
    """Probability that position ``i`` draws from the post-change concept."""
    i = np.arange(n, dtype=np.float64)
    if width == 0:
        return (i >= t0).astype(np.float64)
    prob = 1.0 / (1.0 + np.exp(-4.0 * (i - t0) / width))
    prob[i < t0] = 0.0
    prob[i >= t0 + width] = 1.0
    return prob


def _check_layout(t0, width, n):
    check_positive_int("n", n)
    check_positive_int("t0", t0, minimum=0)
    check_positive_int("width", width, minimum=0)
    if t0 >= n:
        raise ValueError(f"t0 must be below n, got t0={t0}, n={n}")


def _concept_mask(rng, t0, width, n):
    if width == 0:
        return np.arange(n) >= t0
    return rng.random(n) < new_concept_probability(n, t0, width)


def bernoulli_error_stream(p0, p1, t0, width, n, seed):
    """Binary error indicators with rate ``p0`` before and ``p1`` after the change."""
    for name, p in (("p0", p0), ("p1", p1)):
        check_interval(name, p, 0.0, 1.0, low_open=False, high_open=False)
    _check_layout(t0, width, n)
    rng = seed_generator(seed)
    new = _concept_mask(rng, t0, width, n)
    u = rng.random(n)
    return (u < np.where(new, p1, p0)).astype(np.int64)


def gaussian_stream(mu0, sigma0, mu1, sigma1, t0, width, n, seed):
    """Normal values N(mu0, sigma0^2) before and N(mu1, sigma1^2) after the change."""
    for name, v in (("mu0", mu0), ("mu1", mu1)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite")
    for name, v in (("sigma0", sigma0), ("sigma1", sigma1)):
        check_interval(name, v, 0.0, math.inf, low_open=False)
    _check_layout(t0, width, n)
    rng = seed_generator(seed)
    new = _concept_mask(rng, t0, width, n)
    z = rng.standard_normal(n)
    return np.where(new, mu1 + sigma1 * z, mu0 + sigma0 * z)


@dataclass(frozen=True)
class DriftScenario:
    """A single-changepoint stream description.

    ``pre`` and ``post`` hold the distribution parameters: ``{"p": ...}`` for
    Bernoulli streams, ``{"mu": ..., "sigma": ...}`` for Gaussian ones.
    """

    kind: str
    pre: dict
    post: dict
    t0: int
    n: int
    width: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        keys = {"p"} if self.kind == "bernoulli" else {"mu", "sigma"}
        for name, params in (("pre", self.pre), ("post", self.post)):
            if set(params) != keys:
                raise ValueError(f"{name} must have exactly the keys {sorted(keys)}")
        _check_layout(self.t0, self.width, self.n)
        self.generate(0)  # validates the distribution parameters

    def generate(self, seed):
        if self.kind == "bernoulli":
            return bernoulli_error_stream(
                self.pre["p"], self.post["p"], self.t0, self.width, self.n, seed
            )
        return gaussian_stream(
            self.pre["mu"], self.pre["sigma"], self.post["mu"], self.post["sigma"],
            self.t0, self.width, self.n, seed,
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"kind", "pre", "post", "t0", "n", "width"}
        if unknown:
            raise ValueError(f"unknown scenario keys {sorted(unknown)}")
        return cls(**data)


@dataclass
class SeedRecord:
    seed: int
    detection_step: int | None
    delay: int | None
    false_alarms: int
    drift_steps: list


@dataclass
class DetectionReport:
    """Per-seed detection outcomes and their aggregates.

    ``detection_step`` is the first drift at or after ``t0`` (0-based stream
    position) and ``delay = detection_step - t0``. False alarms are drifts
    strictly before ``t0``; ``false_alarm_rate`` is the fraction of seeds
    with at least one.
    """

    t0: int
    records: list = field(default_factory=list)

    @property
    def detection_rate(self):
        if not self.records:
            return 0.0
        return sum(r.detection_step is not None for r in self.records) / len(self.records)

    @property
    def median_delay(self):
        delays = [r.delay for r in self.records if r.delay is not None]
        return statistics.median(delays) if delays else None

    @property
    def false_alarm_rate(self):
        if not self.records:
            return 0.0
        return sum(r.false_alarms > 0 for r in self.records) / len(self.records)

    @property
    def runs_without_false_alarm(self):
        return sum(r.false_alarms == 0 for r in self.records)

    def to_dict(self):
        return {
            "t0": self.t0,
            "n_seeds": len(self.records),
            "detection_rate": self.detection_rate,
            "median_delay": self.median_delay,
            "false_alarm_rate": self.false_alarm_rate,
            "records": [asdict(r) for r in self.records],
        }


def _check_domain(detector, stream):
    try:
        for value in np.unique(stream).tolist():
            detector._check_value(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(
            f"{type(detector).__name__} cannot consume this scenario: {exc}"
        ) from exc


def evaluate(detector, scenario, seeds):
    """Run ``detector`` over the scenario's stream for every seed.

    The detector is reset before each seed. All drift steps are recorded
    (0-based positions); the scenario is not modified.
    """
    if not isinstance(detector, BaseConceptDrift):
        raise TypeError("evaluate needs a streaming concept drift detector")
    report = DetectionReport(t0=scenario.t0)
    for seed in seeds:
        stream = scenario.generate(seed)
        _check_domain(detector, stream)
        detector.reset()
        drift_steps = [
            i for i, value in enumerate(stream.tolist()) if detector.update(value).drift
        ]
        post = [s for s in drift_steps if s >= scenario.t0]
        detection = post[0] if post else None
        report.records.append(
            SeedRecord(
                seed=int(seed),
                detection_step=detection,
                delay=None if detection is None else detection - scenario.t0,
                false_alarms=sum(s < scenario.t0 for s in drift_steps),
                drift_steps=drift_steps,
            )
        )
    return report
