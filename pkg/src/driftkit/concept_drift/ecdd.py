from __future__ import annotations

import math

from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.validation import check_interval, check_positive_int

# Control limit L(p) = c0 + c1 p + c3 p^3 + c5 p^5 + c7 p^7 for smoothing 0.2,
# keyed by the in-control average run length.  The 100 and 400 rows are the
# published fits (Ross et al., 2012); the 1000 row was refitted by simulation,
# see scripts/calibrate_ecdd.py.
CONTROL_LIMIT_COEFFICIENTS = {
    100: (2.76, -6.23, 18.12, -312.45, 1002.18),
    400: (3.97, -6.56, 48.73, -330.13, 848.18),
    1000: (5.8581, -18.4086, 171.9294, -927.5837, 1708.0196),
}


def control_limit(arl0, p):
    c0, c1, c3, c5, c7 = CONTROL_LIMIT_COEFFICIENTS[arl0]
    return c0 + c1 * p + c3 * p**3 + c5 * p**5 + c7 * p**7


class ECDD(BaseConceptDrift):
    """EWMA chart for concept drift detection with warning (ECDD-WT).

    Z_t = (1 - smoothing) Z_{t-1} + smoothing x_t over the binary error
    stream, compared with the running error rate p_t:

        drift    if Z_t > p_t + L(p_t) sigma_Z(t)
        warning  if Z_t > p_t + warning_fraction * L(p_t) sigma_Z(t)

    where sigma_Z(t)^2 = p_t (1 - p_t) smoothing / (2 - smoothing)
    (1 - (1 - smoothing)^(2t)) and L is the control limit polynomial for the
    chosen ``arl0`` (100, 400 or 1000). The polynomials were fitted for
    ``smoothing=0.2``, so other values are rejected.
    """

    _binary_input = True

    def __init__(self, arl0=400, smoothing=0.2, warning_fraction=0.5, min_num_instances=30,
                 callbacks=None):
        self.arl0 = arl0
        self.smoothing = smoothing
        self.warning_fraction = warning_fraction
        self.min_num_instances = min_num_instances
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        if self.arl0 not in CONTROL_LIMIT_COEFFICIENTS:
            raise ValueError(
                f"arl0 must be one of {sorted(CONTROL_LIMIT_COEFFICIENTS)}, got {self.arl0}"
            )
        if self.smoothing != 0.2:
            raise ValueError("control limits are only tabulated for smoothing=0.2")
        check_interval("warning_fraction", self.warning_fraction, 0.0, 1.0)
        check_positive_int("min_num_instances", self.min_num_instances)

    def _reset_stats(self):
        self.n_ = 0
        self.error_rate_ = 0.0
        self.ewma_ = 0.0
        self.decay_ = 1.0  # (1 - smoothing)^(2t)

    def _step(self, error):
        lam = self.smoothing
        self.n_ += 1
        self.error_rate_ += (error - self.error_rate_) / self.n_
        self.ewma_ = (1.0 - lam) * self.ewma_ + lam * error
        self.decay_ *= (1.0 - lam) ** 2
        if self.n_ < self.min_num_instances:
            return NO_SIGNAL
        p = self.error_rate_
        sigma = math.sqrt(p * (1.0 - p) * lam / (2.0 - lam) * (1.0 - self.decay_))
        limit = control_limit(self.arl0, p) * sigma
        excess = self.ewma_ - p
        if excess > limit:
            return DetectionStatus(drift=True)
        if excess > self.warning_fraction * limit:
            return DetectionStatus(warning=True)
        return NO_SIGNAL

    def summary(self):
        if not hasattr(self, "n_"):
            return {}
        return {"n": self.n_, "error_rate": self.error_rate_, "ewma": self.ewma_}
