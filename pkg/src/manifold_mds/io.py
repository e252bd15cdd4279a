"""Reading and writing datasets and run outputs.

Distance matrices are CSV files whose first row holds the object labels and
whose remaining rows hold the matrix.  Manifold points are JSON documents::

    {"kind": "SO", "q": 3, "labels": ["1", "2"],
     "points": [[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], ...]}

Matrices are stored as lists of rows, vectors as flat lists, and complex
entries as ``[re, im]`` pairs.  Floats are written with ``repr`` so a save
and load round trip is exact.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .datasets import ManifoldPoints, RawDistances
from .errors import DatasetError, ManifoldMDSError
from .manifolds import ManifoldKind, ManifoldPoint, Tag, validate
from .stress import DistanceMatrix


def _fmt(x):
    return repr(float(x))


def write_matrix_csv(path, labels, values):
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(labels)
        for row in values:
            writer.writerow([_fmt(x) for x in row])


def read_matrix_csv(path):
    """Return ``(labels, values)`` from a labeled CSV matrix."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    labels = [c.strip() for c in rows[0]]
    n = len(labels)
    body = rows[1:]
    if len(body) != n:
        raise DatasetError(f"{path}: {n} labels but {len(body)} matrix rows")
    values = np.empty((n, n))
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != n:
            raise DatasetError(f"{path}, line {line}: expected {n} fields, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}, line {line}, field {j + 1}: cannot parse {cell!r} as a number"
                ) from None
    return labels, values


def _encode_array(arr):
    if np.iscomplexobj(arr):
        return np.stack([arr.real, arr.imag], axis=-1).tolist()
    return arr.tolist()


def _decode_array(data, kind, where):
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise DatasetError(f"{where}: ragged or non-numeric data") from None
    if kind.tag is Tag.SU:
        if arr.shape != kind.shape + (2,):
            raise DatasetError(f"{where}: expected shape {kind.shape} of [re, im] pairs")
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.shape != kind.shape:
        raise DatasetError(f"{where}: expected shape {kind.shape}, got {arr.shape}")
    return arr


def points_to_json(dataset):
    return {
        "kind": dataset.kind.tag.value,
        "q": dataset.kind.q,
        "labels": list(dataset.labels),
        "points": [_encode_array(p.data) for p in dataset.points],
    }


def points_from_json(doc, source="<json>"):
    try:
        kind = ManifoldKind(Tag(doc["kind"]), doc["q"])
        raw = doc["points"]
    except KeyError as exc:
        raise DatasetError(f"{source}: missing field {exc.args[0]!r}") from None
    except (ValueError, ManifoldMDSError) as exc:
        raise DatasetError(f"{source}: bad kind: {exc}") from None
    labels = doc.get("labels") or [str(k + 1) for k in range(len(raw))]
    points = []
    for k, data in enumerate(raw):
        where = f"{source}, point {k}"
        point = ManifoldPoint(kind, _decode_array(data, kind, where))
        if not validate(point):
            raise DatasetError(f"{where}: not a valid {kind} element")
        points.append(point)
    return ManifoldPoints(kind, labels, points)


def _detect(path, fmt):
    if fmt:
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".json":
        return "json"
    raise DatasetError(f"{path}: cannot tell the format from the extension; pass fmt")


def load_dataset(path, fmt=None):
    """Load a :class:`RawDistances` (CSV) or :class:`ManifoldPoints` (JSON)."""
    fmt = _detect(path, fmt)
    if fmt == "csv":
        labels, values = read_matrix_csv(path)
        try:
            return RawDistances(labels, DistanceMatrix(values))
        except ManifoldMDSError as exc:
            raise DatasetError(f"{path}: {exc}") from None
    if fmt == "json":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}, line {exc.lineno}: {exc.msg}") from None
        return points_from_json(doc, str(path))
    raise DatasetError(f"unknown format {fmt!r}")


def save_dataset(dataset, path, fmt=None):
    fmt = _detect(path, fmt)
    if isinstance(dataset, RawDistances):
        if fmt != "csv":
            raise DatasetError("raw distances are stored as CSV")
        write_matrix_csv(path, dataset.labels, dataset.D.values)
    else:
        if fmt != "json":
            raise DatasetError("manifold points are stored as JSON")
        with open(path, "w") as fh:
            json.dump(points_to_json(dataset), fh, indent=1)
            fh.write("\n")


def write_coords_csv(path, labels, Z):
    Z = np.asarray(Z, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"z{a + 1}" for a in range(Z.shape[1])])
        for label, row in zip(labels, Z):
            writer.writerow([label] + [_fmt(x) for x in row])


def read_coords_csv(path):
    """Return ``(labels, Z)`` from a file written by :func:`write_coords_csv`."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise DatasetError(f"{path}: no coordinates")
    labels, data = [], []
    for i, row in enumerate(rows[1:]):
        labels.append(row[0])
        try:
            data.append([float(c) for c in row[1:]])
        except ValueError:
            raise DatasetError(f"{path}, line {i + 2}: non-numeric coordinate") from None
    try:
        return labels, np.array(data, dtype=float)
    except ValueError:
        raise DatasetError(f"{path}: rows have different lengths") from None


def write_trace_csv(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "stress", "db"])
        db = trace.db if trace.db is not None else [float("nan")] * len(trace)
        for k, (v, x) in enumerate(zip(trace.values, db)):
            writer.writerow([k, _fmt(v), _fmt(x)])
