"""Bayesian online changepoint detection (Adams and MacKay, 2007)."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.core import NO_SIGNAL, DetectionStatus
from driftkit.validation import check_interval, check_positive_int


def student_t_logpdf(x, df, loc, scale_sq):
    """Log density of a location-scale Student t, vectorised over parameters."""
    z = (x - loc) ** 2 / (df * scale_sq)
    return (
        gammaln(0.5 * (df + 1.0))
        - gammaln(0.5 * df)
        - 0.5 * np.log(df * math.pi * scale_sq)
        - 0.5 * (df + 1.0) * np.log1p(z)
    )


class BOCD(BaseConceptDrift):
    """Run-length posterior with a Normal-Gamma model and constant hazard.

    Each run length keeps the Normal-Gamma posterior of the values seen since
    it started; the predictive is a Student t with ``2 alpha`` degrees of
    freedom, location ``mu`` and squared scale ``beta (kappa + 1) / (alpha
    kappa)``. Run lengths whose posterior mass falls below
    ``prune_threshold`` are dropped (smallest first, at most
    ``max_pruned_mass`` in total per step) and the rest renormalised.

    The posterior is not a binary alarm. Drift is reported when the MAP run
    length collapses: ``MAP < collapse_fraction * previous MAP`` while the
    previous MAP exceeded ``min_run``. The posterior keeps running after a
    drift.

    Parameters
    ----------
    hazard : float, default=1/250
        Prior probability of a changepoint at each step.
    mu0, kappa0, alpha0, beta0 : float
        Normal-Gamma prior, defaults 0, 1, 1, 1.
    collapse_fraction : float, default=0.2
    min_run : int, default=10
    prune_threshold : float, default=1e-8
    max_pruned_mass : float, default=1e-6
    """

    def __init__(self, hazard=1 / 250, mu0=0.0, kappa0=1.0, alpha0=1.0, beta0=1.0,
                 collapse_fraction=0.2, min_run=10, prune_threshold=1e-8,
                 max_pruned_mass=1e-6, callbacks=None):
        self.hazard = hazard
        self.mu0 = mu0
        self.kappa0 = kappa0
        self.alpha0 = alpha0
        self.beta0 = beta0
        self.collapse_fraction = collapse_fraction
        self.min_run = min_run
        self.prune_threshold = prune_threshold
        self.max_pruned_mass = max_pruned_mass
        self.callbacks = callbacks
        self._check_params()

    def _check_params(self):
        check_interval("hazard", self.hazard, 0.0, 1.0)
        if not math.isfinite(self.mu0):
            raise ValueError("mu0 must be finite")
        for name in ("kappa0", "alpha0", "beta0"):
            check_interval(name, getattr(self, name), 0.0, math.inf)
        check_interval("collapse_fraction", self.collapse_fraction, 0.0, 1.0)
        check_positive_int("min_run", self.min_run, minimum=0)
        check_interval("prune_threshold", self.prune_threshold, 0.0, 1.0, low_open=False)
        check_interval("max_pruned_mass", self.max_pruned_mass, 0.0, 1.0, low_open=False)

    def _reset_stats(self):
        self.probs_ = np.ones(1)
        self.run_lengths_ = np.zeros(1, dtype=np.int64)
        self.mu_ = np.array([float(self.mu0)])
        self.kappa_ = np.array([float(self.kappa0)])
        self.alpha_ = np.array([float(self.alpha0)])
        self.beta_ = np.array([float(self.beta0)])
        self.map_run_length_ = 0
        self.pruned_mass_ = 0.0

    def _restart_after_drift(self):
        pass

    def _step(self, x):
        log_pred = student_t_logpdf(
            x,
            2.0 * self.alpha_,
            self.mu_,
            self.beta_ * (self.kappa_ + 1.0) / (self.alpha_ * self.kappa_),
        )
        # joint masses in log space, shifted by the max for stability
        log_joint = np.log(self.probs_) + log_pred
        shift = log_joint.max()
        joint = np.exp(log_joint - shift)
        growth = joint * (1.0 - self.hazard)
        changepoint = joint.sum() * self.hazard
        probs = np.concatenate(([changepoint], growth))
        probs /= probs.sum()

        kappa_new = self.kappa_ + 1.0
        mu = np.concatenate(([self.mu0], (self.kappa_ * self.mu_ + x) / kappa_new))
        beta = np.concatenate(
            ([self.beta0], self.beta_ + self.kappa_ * (x - self.mu_) ** 2 / (2.0 * kappa_new))
        )
        kappa = np.concatenate(([self.kappa0], kappa_new))
        alpha = np.concatenate(([self.alpha0], self.alpha_ + 0.5))
        run_lengths = np.concatenate(([0], self.run_lengths_ + 1))

        keep = self._prune_mask(probs)
        self.probs_ = probs[keep] / probs[keep].sum()
        self.mu_, self.kappa_ = mu[keep], kappa[keep]
        self.alpha_, self.beta_ = alpha[keep], beta[keep]
        self.run_lengths_ = run_lengths[keep]

        previous = self.map_run_length_
        self.map_run_length_ = int(self.run_lengths_[np.argmax(self.probs_)])
        if previous > self.min_run and self.map_run_length_ < self.collapse_fraction * previous:
            return DetectionStatus(drift=True)
        return NO_SIGNAL

    def _prune_mask(self, probs):
        keep = np.ones(probs.size, dtype=bool)
        candidates = np.flatnonzero(probs < self.prune_threshold)
        self.pruned_mass_ = 0.0
        if candidates.size == 0 or candidates.size == probs.size:
            return keep
        order = candidates[np.argsort(probs[candidates], kind="stable")]
        cumulative = np.cumsum(probs[order])
        n_drop = int(np.searchsorted(cumulative, self.max_pruned_mass, side="right"))
        keep[order[:n_drop]] = False
        self.pruned_mass_ = float(cumulative[n_drop - 1]) if n_drop else 0.0
        return keep

    @property
    def run_length_posterior(self):
        """Pairs of (run length, probability), shortest run first."""
        if not hasattr(self, "probs_"):
            return []
        return list(zip(self.run_lengths_.tolist(), self.probs_.tolist()))

    def summary(self):
        if not hasattr(self, "probs_"):
            return {}
        return {"map_run_length": self.map_run_length_, "n_run_lengths": int(self.probs_.size)}
