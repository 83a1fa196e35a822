"""Versioned JSON snapshots of detector state.

A snapshot is a JSON object

    {"schema": "driftkit.snapshot", "version": 1, "method": ..., "params": {...},
     "state": {...}}

``params`` are the constructor arguments (callbacks excluded) and ``state``
the learned attributes. Values that JSON cannot represent directly are
wrapped in single-key tagged objects (``{"$ndarray": ...}``, ``{"$float":
"inf"}``, ...). Floats are written with ``repr`` precision, so restoring a
snapshot and continuing yields the same statuses as an uninterrupted run.
"""

from __future__ import annotations

import json
import math
from collections import deque

import numpy as np

from driftkit.concept_drift.base import StreamStats
from driftkit.concept_drift.hddm import _EwmaSample
from driftkit.core import DetectionStatus
from driftkit.data_drift.base import ReferenceSet
from driftkit.registry import get_method, method_name

SCHEMA = "driftkit.snapshot"
VERSION = 1


class SnapshotError(ValueError):
    """Malformed snapshot or snapshot incompatible with the requested detector."""


def encode(value):
    """Convert a state value into JSON-compatible data."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, np.bool_):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return {"$float": repr(value)}
    if isinstance(value, tuple):
        return {"$tuple": [encode(v) for v in value]}
    if isinstance(value, list):
        return [encode(v) for v in value]
    if isinstance(value, deque):
        return {"$deque": [encode(v) for v in value], "maxlen": value.maxlen}
    if isinstance(value, np.ndarray):
        dtype = "object" if value.dtype == object else value.dtype.str
        flat = [encode(v) for v in value.ravel().tolist()]
        return {"$ndarray": flat, "dtype": dtype, "shape": list(value.shape)}
    if isinstance(value, DetectionStatus):
        return {"$status": [value.drift, value.warning]}
    if isinstance(value, StreamStats):
        return {"$stream_stats": encode(value.to_list())}
    if isinstance(value, _EwmaSample):
        return {"$ewma": encode(value.to_list())}
    if isinstance(value, np.random.Generator):
        state = value.bit_generator.state
        return {"$generator": type(value.bit_generator).__name__, "state": encode(state)}
    if isinstance(value, ReferenceSet):
        return {
            "$reference": {
                "columns": [encode(c) for c in value.columns],
                "kinds": list(value.kinds),
                "fit_time": value.fit_time,
            }
        }
    if isinstance(value, dict):
        if not all(isinstance(k, str) for k in value):
            raise SnapshotError("only string dictionary keys can be stored")
        return {"$dict": {k: encode(v) for k, v in value.items()}}
    raise SnapshotError(f"cannot encode {type(value).__name__}")


def decode(data):
    """Inverse of ``encode``."""
    if isinstance(data, list):
        return [decode(v) for v in data]
    if not isinstance(data, dict):
        return data
    if "$float" in data:
        return float(data["$float"])
    if "$tuple" in data:
        return tuple(decode(v) for v in data["$tuple"])
    if "$deque" in data:
        return deque((decode(v) for v in data["$deque"]), maxlen=data["maxlen"])
    if "$ndarray" in data:
        values = decode(data["$ndarray"])
        if data["dtype"] == "object":
            arr = np.empty(len(values), dtype=object)
            arr[:] = values
        else:
            arr = np.asarray(values, dtype=np.dtype(data["dtype"]))
        return arr.reshape(data["shape"])
    if "$status" in data:
        drift, warning = data["$status"]
        return DetectionStatus(drift=drift, warning=warning)
    if "$stream_stats" in data:
        return StreamStats.from_list(decode(data["$stream_stats"]))
    if "$ewma" in data:
        return _EwmaSample.from_list(decode(data["$ewma"]))
    if "$generator" in data:
        bit_gen = getattr(np.random, data["$generator"])()
        bit_gen.state = decode(data["state"])
        return np.random.Generator(bit_gen)
    if "$reference" in data:
        ref = data["$reference"]
        return ReferenceSet(
            [decode(c) for c in ref["columns"]], tuple(ref["kinds"]), ref["fit_time"]
        )
    if "$dict" in data:
        return {k: decode(v) for k, v in data["$dict"].items()}
    raise SnapshotError(f"unknown tagged value with keys {sorted(data)}")


def _params(detector):
    params = detector.get_params(deep=False)
    params.pop("callbacks", None)
    return params


def to_dict(detector):
    """Snapshot document of ``detector`` as a dict."""
    return {
        "schema": SCHEMA,
        "version": VERSION,
        "method": method_name(detector),
        "params": encode(_params(detector)),
        "state": encode(detector.get_state()),
    }


def from_dict(doc, method=None, callbacks=None):
    """Rebuild a detector from a snapshot document.

    ``method``, when given, must match the method stored in the snapshot.
    """
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise SnapshotError("not a driftkit snapshot")
    if doc.get("version") != VERSION:
        raise SnapshotError(f"unsupported snapshot version {doc.get('version')!r}")
    if method is not None and doc.get("method") != method:
        raise SnapshotError(
            f"snapshot holds a {doc.get('method')!r} detector, not {method!r}"
        )
    cls = get_method(doc["method"])
    params = decode(doc["params"])
    detector = cls(**params, callbacks=callbacks)
    detector.set_state(decode(doc["state"]))
    return detector


def dumps(detector):
    return json.dumps(to_dict(detector), allow_nan=False)


def loads(text, method=None, callbacks=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"invalid snapshot JSON: {exc}") from exc
    return from_dict(doc, method=method, callbacks=callbacks)


def save(detector, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(detector))


def load(path, method=None, callbacks=None):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), method=method, callbacks=callbacks)
