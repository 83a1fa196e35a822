"""Command-line interface.

    driftkit --mode batch --method ks --reference ref.csv --test test.csv
    driftkit --mode stream --method ddm --input errors.csv --snapshot state.json
    driftkit --mode stream --method ddm --input more.csv --resume state.json
    driftkit --mode simulate --method ddm --config scenario.yaml

Exit codes: 0 no drift, 3 drift, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
import time

import numpy as np
import yaml

from driftkit import snapshot
from driftkit.concept_drift.base import BaseConceptDrift
from driftkit.data_drift import IncrementalKS, MultivariateMarginals, PermutationTestCallback
from driftkit.registry import BATCH_DATA_DRIFT_METHODS, METHODS, STREAMING_METHODS
from driftkit.streamgen import DriftScenario, evaluate
from driftkit.validation import CATEGORICAL, NUMERICAL

REPORT_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DRIFT = 3

CONFIG_KEYS = {
    "mode", "method", "params", "alpha", "features", "kinds", "correction",
    "permutations", "seed", "reference", "test", "input", "output", "snapshot",
    "resume", "delimiter", "column", "scenario", "seeds", "timing",
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# --------------------------------------------------------------------- output

def _format_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(value, indent=0):
    """Serialize with stable key order and 17 significant digits per float."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [pad + to_json(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".driftkit-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------- config

def build_parser():
    parser = argparse.ArgumentParser(
        prog="driftkit", description="Run drift detectors over files and synthetic streams."
    )
    parser.add_argument("--config", help="YAML or JSON run configuration")
    parser.add_argument("--mode", choices=["batch", "stream", "simulate"])
    parser.add_argument("--method", help="detector name, e.g. ks, hellinger, ddm, adwin")
    parser.add_argument("--alpha", type=float, help="significance level")
    parser.add_argument("--reference", help="reference CSV (batch, incremental_ks)")
    parser.add_argument("--test", help="test CSV (batch)")
    parser.add_argument("--input", help="single-column stream CSV (stream)")
    parser.add_argument("--output", help="report path (default: stdout)")
    parser.add_argument("--seed", type=int, help="seed for permutations / first simulation seed")
    parser.add_argument("--snapshot", help="write detector state here after a stream run")
    parser.add_argument("--resume", help="restore detector state from this snapshot")
    parser.add_argument("--permutations", type=int, metavar="N",
                        help="attach a permutation test with N permutations (batch)")
    parser.add_argument("--timing", action="store_true", default=None,
                        help="record wall time in the report")
    return parser


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"invalid config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError("config must be a mapping")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve_config(args):
    config = load_config(args.config) if args.config else {}
    for key in ("mode", "method", "alpha", "reference", "test", "input", "output", "seed",
                "snapshot", "resume", "permutations", "timing"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    config.setdefault("params", {})
    config.setdefault("correction", "none")
    config.setdefault("delimiter", ",")
    config.setdefault("seed", 0)
    config.setdefault("timing", False)
    _validate_config(config)
    return config


def _validate_config(config):
    mode, method = config.get("mode"), config.get("method")
    if mode not in ("batch", "stream", "simulate"):
        raise UsageError("--mode must be batch, stream or simulate")
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    if not isinstance(config["params"], dict):
        raise UsageError("params must be a mapping")
    if mode == "batch" and method not in BATCH_DATA_DRIFT_METHODS:
        raise UsageError(f"{method} is a streaming method; use --mode stream")
    if mode in ("stream", "simulate") and method not in STREAMING_METHODS:
        raise UsageError(f"{method} is a batch method; use --mode batch")
    if mode == "simulate" and method == "incremental_ks":
        raise UsageError("simulate mode supports concept drift detectors only")
    alpha = config.get("alpha")
    if alpha is not None and not (isinstance(alpha, (int, float)) and 0 < alpha < 1):
        raise UsageError("alpha must lie in (0, 1)")
    perms = config.get("permutations")
    if perms is not None and (not isinstance(perms, int) or perms < 1):
        raise UsageError("--permutations must be a positive integer")
    if not isinstance(config["seed"], int) or config["seed"] < 0:
        raise UsageError("seed must be a non-negative integer")
    if config["correction"] not in ("none", "bonferroni"):
        raise UsageError("correction must be none or bonferroni")
    kinds = config.get("kinds", {})
    if not isinstance(kinds, dict) or any(v not in (NUMERICAL, CATEGORICAL) for v in kinds.values()):
        raise UsageError("kinds must map column names to 'numerical' or 'categorical'")
    required = {"batch": ("reference", "test"), "stream": ("input",), "simulate": ("scenario",)}
    for key in required[mode]:
        if not config.get(key):
            raise UsageError(f"{mode} mode needs {key}")
    if mode == "stream" and method == "incremental_ks" and not (
        config.get("reference") or config.get("resume")
    ):
        raise UsageError("incremental_ks needs --reference or --resume")


def _detector_params(config, cls):
    params = dict(config["params"])
    if config.get("alpha") is not None and "alpha" in cls().get_params():
        params.setdefault("alpha", config["alpha"])
    return params


def build_detector(config, callbacks=None):
    cls = METHODS[config["method"]]
    try:
        return cls(**_detector_params(config, cls), callbacks=callbacks)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid parameters for {config['method']}: {exc}") from exc


# ----------------------------------------------------------------------- data

def read_table(path, delimiter=","):
    """Header and rows of a delimiter-separated UTF-8 file."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8") from exc
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path} is empty")
    header, body = [h.strip() for h in rows[0]], rows[1:]
    if not body:
        raise DataError(f"{path} has a header but no rows")
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path} line {i}: expected {len(header)} fields, got {len(row)}")
    return header, body


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        return None


def infer_column_kind(cells):
    """Categorical as soon as one value fails to parse as a number."""
    return NUMERICAL if all(_parse_float(c) is not None for c in cells) else CATEGORICAL


def _column(cells, kind, name, path):
    if kind == CATEGORICAL:
        arr = np.empty(len(cells), dtype=object)
        arr[:] = [c.strip() for c in cells]
        return arr
    values = [_parse_float(c) for c in cells]
    if any(v is None for v in values):
        raise DataError(f"{path}: column {name!r} has non-numeric values")
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{path}: column {name!r} has non-finite values")
    return arr


def load_batch_data(config):
    ref_header, ref_rows = read_table(config["reference"], config["delimiter"])
    test_header, test_rows = read_table(config["test"], config["delimiter"])
    features = config.get("features") or ref_header
    for name in features:
        if name not in ref_header:
            raise DataError(f"column {name!r} missing from the reference file")
        if name not in test_header:
            raise DataError(f"column {name!r} missing from the test file")
    overrides = config.get("kinds", {})
    ref_cols, test_cols, kinds = [], [], []
    for name in features:
        ri, ti = ref_header.index(name), test_header.index(name)
        ref_cells = [r[ri] for r in ref_rows]
        test_cells = [r[ti] for r in test_rows]
        kind = overrides.get(name) or infer_column_kind(ref_cells)
        ref_cols.append(_column(ref_cells, kind, name, config["reference"]))
        test_cols.append(_column(test_cells, kind, name, config["test"]))
        kinds.append(kind)
    return features, ref_cols, test_cols, kinds


def load_stream(path, config):
    header, rows = read_table(path, config["delimiter"])
    name = config.get("column")
    if name is None:
        if len(header) != 1:
            raise DataError(f"{path}: expected one column, got {len(header)}; set 'column'")
        name = header[0]
    if name not in header:
        raise DataError(f"{path}: no column {name!r}")
    idx = header.index(name)
    return _column([r[idx] for r in rows], NUMERICAL, name, path)


def _matrix(columns):
    if len(columns) == 1:
        return columns[0]
    if all(c.dtype != object for c in columns):
        return np.column_stack(columns)
    out = np.empty((columns[0].size, len(columns)), dtype=object)
    for j, c in enumerate(columns):
        out[:, j] = c
    return out


# ---------------------------------------------------------------------- modes

def _config_echo(config):
    return {k: config[k] for k in sorted(config) if k not in ("timing", "output")}


def _warnings_from(result, features, smoothed):
    warnings = []
    results = [result] + list(result.breakdown or [])
    for r in results:
        ex = r.extras
        if r is result and result.breakdown:
            continue
        prefix = f"feature {features[ex['feature']]}: " if "feature" in ex else ""
        if ex.get("clipped"):
            warnings.append(f"{prefix}{ex['clipped']} test value(s) clipped into end bins")
        if ex.get("saturated"):
            warnings.append(f"{prefix}raw {r.method} is infinite; reporting the smoothed value")
        if ex.get("degenerate"):
            warnings.append(f"{prefix}zero variance in both samples")
        if ex.get("degenerate_reference"):
            warnings.append(f"{prefix}constant reference; single padded bin")
        if smoothed and ex.get("smoothing_epsilon_ref") is not None:
            warnings.append(
                f"{prefix}histograms smoothed with epsilon {ex['smoothing_epsilon_ref']:.3g} "
                f"(reference) / {ex['smoothing_epsilon_test']:.3g} (test)"
            )
        if ex.get("p_value_capped"):
            warnings.append(f"{prefix}asymptotic p-value capped to the tabulated range")
    if result.drift is None:
        warnings.append(
            "distance reported without a decision; configure params.threshold or --permutations"
        )
    return warnings


def run_batch(config):
    callbacks = None
    if config.get("permutations"):
        callbacks = [
            PermutationTestCallback(
                n_permutations=config["permutations"],
                random_state=config["seed"],
                alpha=config.get("alpha") or 0.05,
            )
        ]
    detector = build_detector(config, callbacks=callbacks)
    smoothed = getattr(detector, "_smoothed", False)
    features, ref_cols, test_cols, _ = load_batch_data(config)
    if len(features) > 1 and not detector._multivariate:
        # every per-feature clone gets its own copy of the callbacks
        detector = MultivariateMarginals(
            detector,
            correction=config["correction"],
            alpha=config.get("alpha") or getattr(detector, "alpha", 0.05),
        )
    try:
        detector.fit(_matrix(ref_cols))
        result = detector.compare(_matrix(test_cols))
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "mode": "batch",
        "method": config["method"],
        "config": _config_echo(config),
        "n_ref": int(ref_cols[0].size),
        "n_test": int(test_cols[0].size),
        "features": list(features),
        "statistic": result.statistic,
        "p_value": result.p_value,
        "drift": bool(result.drift),
        "breakdown": [
            {"feature": features[r.extras["feature"]], **r.to_dict()}
            for r in (result.breakdown or [])
        ],
        "extras": result.to_dict()["extras"],
        "warnings": _warnings_from(result, features, smoothed),
    }
    return report, bool(result.drift)


def run_stream(config):
    method = config["method"]
    if config.get("resume"):
        try:
            detector = snapshot.load(config["resume"], method=method)
        except OSError as exc:
            raise DataError(f"cannot read snapshot: {exc}") from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot resume: {exc}") from exc
    else:
        detector = build_detector(config)
    values = load_stream(config["input"], config)
    if isinstance(detector, IncrementalKS) and not hasattr(detector, "reference_"):
        ref = load_stream(config["reference"], config)
        detector.fit(ref)
    for v in np.unique(values).tolist():
        try:
            detector._check_value(v)
        except (TypeError, ValueError) as exc:
            raise DataError(f"{config['input']}: {exc}") from exc

    start = getattr(detector, "step_", 0)
    events = []
    last = None
    for offset, value in enumerate(values.tolist()):
        out = detector.update(value)
        position = start + offset
        if isinstance(detector, BaseConceptDrift):
            drift, warning = out.drift, out.warning
        else:
            drift, warning, last = bool(out.drift), False, out
        if drift:
            events.append({"step": position, "type": "drift"})
        elif warning:
            events.append({"step": position, "type": "warning"})
    if config.get("snapshot"):
        write_atomic(config["snapshot"], snapshot.dumps(detector))
    drifted = any(e["type"] == "drift" for e in events)
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "mode": "stream",
        "method": method,
        "config": _config_echo(config),
        "first_step": start,
        "n_processed": int(values.size),
        "events": events,
        "n_drift": sum(e["type"] == "drift" for e in events),
        "n_warning": sum(e["type"] == "warning" for e in events),
        "drift": drifted,
        "summary": detector.summary(),
        "warnings": [],
    }
    if last is not None:
        report["statistic"] = last.statistic
        report["p_value"] = last.p_value
    return report, drifted


def run_simulate(config):
    try:
        scenario = DriftScenario.from_dict(config["scenario"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid scenario: {exc}") from exc
    seeds = config.get("seeds", 100)
    if isinstance(seeds, int):
        seeds = list(range(config["seed"], config["seed"] + seeds))
    if not isinstance(seeds, list) or not all(isinstance(s, int) and s >= 0 for s in seeds):
        raise UsageError("seeds must be a count or a list of non-negative integers")
    detector = build_detector(config)
    try:
        outcome = evaluate(detector, scenario, seeds)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "mode": "simulate",
        "method": config["method"],
        "config": _config_echo(config),
        **outcome.to_dict(),
        "warnings": [],
    }
    return report, False


MODES = {"batch": run_batch, "stream": run_stream, "simulate": run_simulate}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    started = time.perf_counter()
    try:
        config = resolve_config(args)
        report, drift = MODES[config["mode"]](config)
    except UsageError as exc:
        print(f"driftkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"driftkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    report["wall_time"] = time.perf_counter() - started if config["timing"] else None
    text = to_json(report) + "\n"
    if config.get("output"):
        write_atomic(config["output"], text)
    else:
        sys.stdout.write(text)
    return EXIT_DRIFT if drift else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
