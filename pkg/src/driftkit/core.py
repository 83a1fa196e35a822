"""Detector lifecycle, callback dispatch and prequential error metrics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from sklearn.base import BaseEstimator

from driftkit.validation import check_finite_value, check_interval, check_positive_int

HOOKS = (
    "on_fit_start",
    "on_fit_end",
    "on_update_start",
    "on_update_end",
    "on_compare_start",
    "on_compare_end",
    "on_drift_detected",
)
_BATCH_ONLY = frozenset({"on_compare_start", "on_compare_end"})
_STREAMING_ONLY = frozenset({"on_update_start", "on_update_end"})

BATCH = "batch"
STREAMING = "streaming"


@dataclass(frozen=True)
class DetectionStatus:
    """Outcome of one streaming update."""

    drift: bool = False
    warning: bool = False


NO_SIGNAL = DetectionStatus()


class CallbackError(RuntimeError):
    """A callback hook raised; the detector state is unaffected."""

    def __init__(self, callback, stage, original):
        super().__init__(f"{type(callback).__name__}.{stage} failed: {original!r}")
        self.callback = callback
        self.stage = stage
        self.original = original


class NotFittedError(ValueError, AttributeError):
    """Raised when a data drift detector is used before ``fit``."""


class Callback:
    """Base class for detector callbacks.

    Subclasses override any of the hooks in ``HOOKS``. Each hook receives a
    read-only view of the detector and a stage specific payload. ``logs`` is
    free for the callback to use.
    """

    def __init__(self):
        self.logs = []

    def reset(self):
        """Called when the owning detector is reset."""

    def on_fit_start(self, detector, payload):
        pass

    def on_fit_end(self, detector, payload):
        pass

    def on_update_start(self, detector, payload):
        pass

    def on_update_end(self, detector, payload):
        pass

    def on_compare_start(self, detector, payload):
        pass

    def on_compare_end(self, detector, payload):
        pass

    def on_drift_detected(self, detector, payload):
        pass


class DetectorView:
    """Read-only proxy handed to callbacks."""

    _BLOCKED = frozenset(
        {"update", "update_many", "fit", "reset", "set_params", "set_state", "compare"}
    )

    __slots__ = ("_detector",)

    def __init__(self, detector):
        object.__setattr__(self, "_detector", detector)

    def __getattr__(self, name):
        if name in self._BLOCKED:
            raise AttributeError(f"{name!r} is not available from a callback")
        return getattr(self._detector, name)

    def __setattr__(self, name, value):
        raise AttributeError("detector view is read-only")

    def __delattr__(self, name):
        raise AttributeError("detector view is read-only")

    def __repr__(self):
        return f"DetectorView({self._detector!r})"


class CallbackSet:
    """Ordered collection of callbacks with category-gated dispatch."""

    def __init__(self, callbacks=None):
        self._callbacks = list(callbacks or [])

    def __iter__(self):
        return iter(self._callbacks)

    def __len__(self):
        return len(self._callbacks)

    def dispatch(self, stage, detector, payload=None, *, category):
        """Fire ``stage`` on every callback in registration order.

        Hooks restricted to the other detector category are skipped. The first
        failing hook aborts the stage and is re-raised as ``CallbackError``.
        """
        if stage not in HOOKS:
            raise ValueError(f"unknown callback stage {stage!r}")
        if stage in _BATCH_ONLY and category != BATCH:
            return
        if stage in _STREAMING_ONLY and category != STREAMING:
            return
        if not self._callbacks:
            return
        view = DetectorView(detector)
        for callback in self._callbacks:
            hook = getattr(callback, stage, None)
            if hook is None:
                continue
            try:
                hook(view, payload)
            except Exception as exc:
                raise CallbackError(callback, stage, exc) from exc


class BaseDetector(BaseEstimator):
    """Common lifecycle for every detector.

    Constructor arguments are the configuration (available through
    ``get_params``). Everything learned from data lives in attributes whose
    name ends with an underscore; ``reset`` deletes them, which returns the
    detector to its freshly constructed state while keeping its callbacks.
    """

    _category = STREAMING

    def _check_params(self):
        """Validate constructor arguments. Overridden by subclasses."""

    def _dispatch(self, stage, payload=None):
        if self.callbacks:
            CallbackSet(self.callbacks).dispatch(stage, self, payload, category=self._category)

    def _state_names(self):
        return sorted(k for k in vars(self) if k.endswith("_") and not k.startswith("_"))

    def reset(self):
        """Forget all data seen so far."""
        for name in self._state_names():
            delattr(self, name)
        for callback in self.callbacks or ():
            callback.reset()
        return self

    def get_state(self):
        """Learned state as a plain dict (see ``driftkit.snapshot``)."""
        return {name: getattr(self, name) for name in self._state_names()}

    def set_state(self, state):
        self.reset()
        for name, value in state.items():
            if not name.endswith("_"):
                raise ValueError(f"invalid state attribute {name!r}")
            setattr(self, name, value)
        return self

    def summary(self):
        """Small dict of statistics describing the current state."""
        return {}

    def set_params(self, **params):
        super().set_params(**params)
        self._check_params()
        return self


class HistoryCallback(Callback):
    """Record every streaming update.

    Each entry of ``logs`` is a dict with the 1-based ``step``, the observed
    ``value``, the returned ``status`` and the detector ``summary``. Drift
    steps are additionally collected in ``drift_steps``.

    Parameters
    ----------
    keep_on_reset : bool, default=False
        Keep the log when the detector is reset (useful for multi-episode
        experiments).
    """

    def __init__(self, keep_on_reset=False):
        super().__init__()
        self.keep_on_reset = keep_on_reset
        self.drift_steps = []

    def reset(self):
        if not self.keep_on_reset:
            self.logs = []
            self.drift_steps = []

    def on_update_end(self, detector, payload):
        self.logs.append(
            {
                "step": payload["step"],
                "value": payload["value"],
                "status": payload["status"],
                "summary": detector.summary(),
            }
        )

    def on_drift_detected(self, detector, payload):
        if isinstance(payload, dict) and "step" in payload:
            self.drift_steps.append(payload["step"])


class PrequentialError:
    """Fading-factor prequential loss estimate.

    With losses l_1, l_2, ... and fading factor ``alpha`` the estimate is
    S_i / B_i where S_i = l_i + alpha * S_{i-1} and B_i = 1 + alpha * B_{i-1}.
    ``alpha=1`` gives the running mean.
    """

    def __init__(self, alpha=1.0):
        check_interval("alpha", alpha, 0.0, 1.0, high_open=False)
        self.alpha = alpha
        self.reset()

    def reset(self):
        self.loss_sum = 0.0
        self.weight_sum = 0.0
        self.n = 0
        self._estimate = 0.0

    def update(self, loss) -> float:
        loss = check_finite_value(loss)
        if loss < 0:
            raise ValueError(f"loss must be non-negative, got {loss}")
        self.n += 1
        self.loss_sum = loss + self.alpha * self.loss_sum
        self.weight_sum = 1.0 + self.alpha * self.weight_sum
        # Incremental form of loss_sum / weight_sum; exact for constant losses.
        self._estimate += (loss - self._estimate) / self.weight_sum
        return self._estimate

    @property
    def estimate(self):
        """Current estimate, or ``None`` before the first update."""
        return self._estimate if self.n else None


class WindowedPrequentialError:
    """Prequential loss averaged over the last ``window_size`` losses."""

    def __init__(self, window_size=100):
        check_positive_int("window_size", window_size)
        self.window_size = window_size
        self.reset()

    def reset(self):
        self._window = deque(maxlen=self.window_size)
        self.n = 0

    def update(self, loss) -> float:
        loss = check_finite_value(loss)
        if loss < 0:
            raise ValueError(f"loss must be non-negative, got {loss}")
        self._window.append(loss)
        self.n += 1
        return math.fsum(self._window) / len(self._window)

    @property
    def estimate(self):
        if not self._window:
            return None
        return math.fsum(self._window) / len(self._window)
