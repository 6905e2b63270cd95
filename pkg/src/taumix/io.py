"""File formats: trajectory JSONL, minibatch-log JSONL, curve CSV.

JSONL keeps fixtures human-diffable and easy for external exporters to
produce.  Floats are serialized as shortest round-trip decimals (Python's
default float repr).  Readers validate structure eagerly and report the
offending line number.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np


class FormatError(Exception):
    """A file does not conform to the expected schema."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)


def _python_floats(values):
    return [float(v) for v in values]


# -- trajectory JSONL -------------------------------------------------------

def write_trajectory(path, data):
    """Write rows of a (T, d) array as {"t": 1-based index, "x": row}."""
    data = np.asarray(getattr(data, "data", data), dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    with open(path, "w") as fh:
        for i, row in enumerate(data):
            fh.write(json.dumps({"t": i + 1, "x": _python_floats(row)}))
            fh.write("\n")


def read_trajectory(path) -> np.ndarray:
    """Parse a trajectory file back into a (T, d) float array."""
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", path, lineno)
            if not isinstance(rec, dict) or "t" not in rec or "x" not in rec:
                raise FormatError("record must have fields 't' and 'x'",
                                  path, lineno)
            t, x = rec["t"], rec["x"]
            if not isinstance(t, int) or isinstance(t, bool):
                raise FormatError("'t' must be an integer", path, lineno)
            if t != len(rows) + 1:
                raise FormatError(
                    f"'t' must increase from 1 (expected {len(rows) + 1}, "
                    f"got {t})", path, lineno)
            if not isinstance(x, list) or not x:
                raise FormatError("'x' must be a nonempty array", path, lineno)
            if width is None:
                width = len(x)
            elif len(x) != width:
                raise FormatError(
                    f"'x' length {len(x)} differs from first row ({width})",
                    path, lineno)
            try:
                vals = [float(v) for v in x]
            except (TypeError, ValueError):
                raise FormatError("'x' entries must be numbers", path, lineno)
            if not all(math.isfinite(v) for v in vals):
                raise FormatError("'x' entries must be finite", path, lineno)
            rows.append(vals)
    if not rows:
        raise FormatError("file contains no records", path)
    return np.asarray(rows, dtype=np.float64)


# -- minibatch-log JSONL ----------------------------------------------------

@dataclass(frozen=True)
class MinibatchRecord:
    update: int
    sampler_kind: str
    params: dict
    indices: np.ndarray
    rows: np.ndarray


def write_minibatch_log(path, log):
    """Write LoggedUpdate-like entries (update, sampler_kind, params,
    indices, rows) as one JSON record per line."""
    with open(path, "w") as fh:
        for entry in log:
            rec = {
                "update": int(entry.update),
                "sampler": {"kind": entry.sampler_kind,
                            "params": dict(entry.params)},
                "indices": [int(i) for i in entry.indices],
                "rows": [_python_floats(r) for r in np.atleast_2d(entry.rows)],
            }
            fh.write(json.dumps(rec))
            fh.write("\n")


def read_minibatch_log(path):
    """Parse a minibatch log into a list of MinibatchRecord."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", path, lineno)
            for key in ("update", "sampler", "indices", "rows"):
                if not isinstance(rec, dict) or key not in rec:
                    raise FormatError(f"record must have field {key!r}",
                                      path, lineno)
            update = rec["update"]
            if not isinstance(update, int) or isinstance(update, bool) or update < 1:
                raise FormatError("'update' must be an integer >= 1",
                                  path, lineno)
            sampler = rec["sampler"]
            if (not isinstance(sampler, dict) or "kind" not in sampler
                    or "params" not in sampler
                    or not isinstance(sampler["kind"], str)
                    or not isinstance(sampler["params"], dict)):
                raise FormatError(
                    "'sampler' must be an object with 'kind' and 'params'",
                    path, lineno)
            indices = rec["indices"]
            rows = rec["rows"]
            if not isinstance(indices, list) or not all(
                    isinstance(i, int) and not isinstance(i, bool) and i >= 0
                    for i in indices):
                raise FormatError("'indices' must be nonnegative integers",
                                  path, lineno)
            if not isinstance(rows, list) or not rows:
                raise FormatError("'rows' must be a nonempty array of arrays",
                                  path, lineno)
            if len(indices) != len(rows):
                raise FormatError(
                    f"|indices| = {len(indices)} but |rows| = {len(rows)}",
                    path, lineno)
            width = None
            for r in rows:
                if not isinstance(r, list):
                    raise FormatError("'rows' entries must be arrays",
                                      path, lineno)
                if width is None:
                    width = len(r)
                elif len(r) != width:
                    raise FormatError("'rows' entries must share one length",
                                      path, lineno)
            try:
                arr = np.asarray(rows, dtype=np.float64)
            except (TypeError, ValueError):
                raise FormatError("'rows' entries must be numbers",
                                  path, lineno)
            if not np.isfinite(arr).all():
                raise FormatError("'rows' entries must be finite",
                                  path, lineno)
            out.append(MinibatchRecord(
                update=update, sampler_kind=sampler["kind"],
                params=sampler["params"],
                indices=np.asarray(indices, dtype=np.int64), rows=arr))
    if not out:
        raise FormatError("file contains no records", path)
    return out


# -- curve CSV --------------------------------------------------------------

CURVE_HEADER = ["k", "mean", "se", "n_replicates"]


def write_curve_csv(path, curve):
    """Write a per-lag curve; se is left empty for single-replicate curves."""
    lags = np.asarray(curve.lags)
    if hasattr(curve, "mean"):
        mean = np.asarray(curve.mean, dtype=np.float64)
        se = np.asarray(curve.se, dtype=np.float64)
        n_rep = int(curve.n_replicates)
    else:
        mean = np.asarray(curve.values, dtype=np.float64)
        se = None
        n_rep = 1
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_HEADER)
        for j, k in enumerate(lags):
            se_field = "" if n_rep == 1 else repr(float(se[j]))
            writer.writerow([int(k), repr(float(mean[j])), se_field, n_rep])


def read_curve_csv(path):
    """Parse a curve CSV into (lags, mean, se, n_replicates); se entries are
    NaN where the file leaves them empty."""
    lags, mean, se, n_reps = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("file is empty", path)
        if header != CURVE_HEADER:
            raise FormatError(
                f"header must be {','.join(CURVE_HEADER)!r}", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise FormatError("row must have 4 fields", path, lineno)
            try:
                k = int(row[0])
                m = float(row[1])
                s = math.nan if row[2] == "" else float(row[2])
                n = int(row[3])
            except ValueError:
                raise FormatError("unparsable numeric field", path, lineno)
            if k != len(lags) + 1:
                raise FormatError(
                    f"'k' must run 1..K contiguously (expected "
                    f"{len(lags) + 1}, got {k})", path, lineno)
            if not m >= 0:
                raise FormatError("'mean' must be >= 0", path, lineno)
            lags.append(k)
            mean.append(m)
            se.append(s)
            n_reps.append(n)
    if not lags:
        raise FormatError("file contains no data rows", path)
    if len(set(n_reps)) != 1:
        raise FormatError("'n_replicates' must be constant within a file",
                          path)
    return (np.asarray(lags, dtype=np.int64),
            np.asarray(mean, dtype=np.float64),
            np.asarray(se, dtype=np.float64),
            n_reps[0])


# -- returns CSV and policy files -------------------------------------------

def write_returns_csv(path, returns):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "return"])
        for i, r in enumerate(returns, start=1):
            writer.writerow([i, repr(float(r))])


def write_policy(path, env_kind, q):
    """Persist a Q function (tabular or linear) with its environment kind."""
    rec = {"env": env_kind, "kind": q.kind,
           "params": [_python_floats(row) for row in np.atleast_2d(q.params)]}
    with open(path, "w") as fh:
        json.dump(rec, fh)
        fh.write("\n")


def read_policy(path):
    """Load a policy file; returns (env_kind, q_kind, params array)."""
    with open(path) as fh:
        try:
            rec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", path)
    for key in ("env", "kind", "params"):
        if not isinstance(rec, dict) or key not in rec:
            raise FormatError(f"policy file must have field {key!r}", path)
    try:
        params = np.asarray(rec["params"], dtype=np.float64)
    except (TypeError, ValueError):
        raise FormatError("'params' must be a numeric matrix", path)
    if params.ndim != 2 or not np.isfinite(params).all():
        raise FormatError("'params' must be a finite 2-D matrix", path)
    return rec["env"], rec["kind"], params
