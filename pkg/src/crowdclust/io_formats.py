"""Parsing, serialization, and synthetic generation of ensembles and results.

Canonical ensemble format (JSON)::

    {"num_objects": 4, "num_clusters": 2,
     "solutions": [{"worker_id": "w1", "labels": [1, 1, 2, 2]}, ...]}

CSV ingestion: one worker per row, one object per column, a header row of
object ids, and the worker id in the first column::

    worker_id,obj1,obj2,obj3,obj4
    w1,1,1,2,2

CSV carries no cluster count; pass ``num_clusters`` explicitly or the
maximum observed label is used.

Result documents are JSON with a fixed key order and reals rounded to 12
significant digits, so serialization is byte-deterministic.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np

from .consensus import ConsensusConfig, ConsensusResult
from .ensemble import ClusteringSolution, Ensemble
from .errors import InputError
from .metrics import (
    Partition,
    PartitionLike,
    adjusted_rand_index,
    as_partition,
    hubert_index,
    mirkin_index,
    rand_index,
)

__all__ = [
    "parse_ensemble",
    "serialize_ensemble",
    "result_document",
    "serialize_result",
    "parse_result",
    "generate_synthetic",
]


def _as_text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"input is not valid UTF-8: {exc}") from exc
    return data


def _require_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_ensemble_json(text: str) -> Ensemble:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("ensemble document must be a JSON object")
    for key in ("num_objects", "num_clusters", "solutions"):
        if key not in doc:
            raise InputError(f"missing required key {key!r}")
    num_objects = _require_int(doc["num_objects"], "num_objects")
    num_clusters = _require_int(doc["num_clusters"], "num_clusters")
    if not isinstance(doc["solutions"], list):
        raise InputError("solutions: expected a list")
    solutions = []
    for i, entry in enumerate(doc["solutions"]):
        where = f"solutions[{i}]"
        if not isinstance(entry, dict):
            raise InputError(f"{where}: expected an object")
        if "worker_id" not in entry or "labels" not in entry:
            raise InputError(f"{where}: needs worker_id and labels")
        worker_id = entry["worker_id"]
        if not isinstance(worker_id, str) or not worker_id:
            raise InputError(f"{where}.worker_id: expected a nonempty string")
        labels = entry["labels"]
        if not isinstance(labels, list):
            raise InputError(f"{where}.labels: expected a list")
        row = []
        for j, lab in enumerate(labels):
            lab = _require_int(lab, f"{where}.labels[{j}]")
            if not 1 <= lab <= num_clusters:
                raise InputError(
                    f"{where}.labels[{j}]: label {lab} outside [1, {num_clusters}]"
                )
            row.append(lab)
        solutions.append(ClusteringSolution(worker_id, tuple(row)))
    return Ensemble(num_objects, num_clusters, tuple(solutions))


def _parse_ensemble_csv(text: str, num_clusters: int | None) -> Ensemble:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if len(rows) < 2:
        raise InputError("CSV needs a header row and at least one worker row")
    header = rows[0]
    if len(header) < 2 or header[0] != "worker_id":
        raise InputError(
            "CSV header must start with 'worker_id' followed by object ids"
        )
    num_objects = len(header) - 1
    parsed: list[tuple[str, list[int]]] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != num_objects + 1:
            raise InputError(
                f"row {r}: has {len(row) - 1} labels, expected {num_objects}"
            )
        worker_id = row[0]
        if not worker_id:
            raise InputError(f"row {r}: empty worker_id")
        labels = []
        for c, cell in enumerate(row[1:], start=2):
            try:
                lab = int(cell)
            except ValueError:
                raise InputError(
                    f"row {r}, column {c}: {cell!r} is not an integer label"
                ) from None
            labels.append(lab)
        parsed.append((worker_id, labels))
    if num_clusters is None:
        num_clusters = max((max(lab, default=0) for _, lab in parsed), default=0)
    for r, (_, labels) in enumerate(parsed, start=2):
        for c, lab in enumerate(labels, start=2):
            if not 1 <= lab <= num_clusters:
                raise InputError(
                    f"row {r}, column {c}: label {lab} outside [1, {num_clusters}]"
                )
    solutions = tuple(
        ClusteringSolution(wid, tuple(labels)) for wid, labels in parsed
    )
    return Ensemble(num_objects, num_clusters, solutions)


def parse_ensemble(
    data: bytes | str,
    format: str = "json",
    num_clusters: int | None = None,
) -> Ensemble:
    """Parse and validate an ensemble document.

    Raises :class:`InputError` naming the offending field (JSON) or row and
    column (CSV) on any invariant violation.
    """
    text = _as_text(data)
    if format == "json":
        return _parse_ensemble_json(text)
    if format == "csv":
        return _parse_ensemble_csv(text, num_clusters)
    raise InputError(f"unknown format {format!r} (expected 'json' or 'csv')")


def serialize_ensemble(e: Ensemble, format: str = "json") -> bytes:
    """Serialize an ensemble to the canonical JSON form (or CSV)."""
    if format == "json":
        doc = {
            "num_objects": e.num_objects,
            "num_clusters": e.num_clusters,
            "solutions": [
                {"worker_id": s.worker_id, "labels": list(s.labels)}
                for s in e.solutions
            ],
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["worker_id"] + [f"obj{i + 1}" for i in range(e.num_objects)])
        for s in e.solutions:
            writer.writerow([s.worker_id] + list(s.labels))
        return out.getvalue().encode("utf-8")
    raise InputError(f"unknown format {format!r} (expected 'json' or 'csv')")


def _round12(value: Any) -> Any:
    """Round every float to 12 significant digits, recursively."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round12(v) for v in value]
    return value


def result_document(
    result: ConsensusResult,
    ensemble: Ensemble,
    config: ConsensusConfig,
    truth: PartitionLike | None = None,
) -> dict:
    """Assemble the result document (fixed key order) for a consensus run.

    With ``truth`` given, a metric block comparing the consensus labels
    against it is included.
    """
    reference = ensemble.solutions[result.reference_index - 1]
    doc: dict[str, Any] = {
        "num_objects": ensemble.num_objects,
        "num_clusters": ensemble.num_clusters,
        "labels": list(result.labels),
        "reference_worker_id": reference.worker_id,
        "reference_index": result.reference_index,
        "weights": {
            "raw": [float(x) for x in result.weights.raw],
            "normalized": [float(x) for x in result.weights.normalized],
        },
        "distributions": [[float(x) for x in row] for row in result.distributions],
        "iterations": list(result.iterations),
        "config": {
            "tolerance": config.tolerance,
            "max_iterations": config.max_iterations,
            "damping": config.damping,
            "weight_floor": config.weight_floor,
        },
    }
    if truth is not None:
        truth = as_partition(truth)
        labels = Partition(result.labels, ensemble.num_clusters)
        doc["metrics"] = {
            "adjusted_rand": adjusted_rand_index(labels, truth),
            "rand": rand_index(labels, truth),
            "mirkin": mirkin_index(labels, truth),
            "hubert": hubert_index(labels, truth),
        }
    return doc


def serialize_result(
    result: ConsensusResult,
    ensemble: Ensemble,
    config: ConsensusConfig,
    truth: PartitionLike | None = None,
) -> bytes:
    """Byte-deterministic JSON for a consensus result."""
    doc = result_document(result, ensemble, config, truth)
    return serialize_result_document(doc)


def serialize_result_document(doc: dict) -> bytes:
    return (json.dumps(_round12(doc), indent=2) + "\n").encode("utf-8")


def parse_result(data: bytes | str) -> dict:
    """Parse a result document and check its internal consistency."""
    try:
        doc = json.loads(_as_text(data))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("result document must be a JSON object")
    for key in ("labels", "distributions", "weights", "reference_worker_id", "config"):
        if key not in doc:
            raise InputError(f"missing required key {key!r}")
    labels = doc["labels"]
    dists = doc["distributions"]
    if len(labels) != len(dists):
        raise InputError(
            f"{len(labels)} labels but {len(dists)} distributions"
        )
    for y, (lab, row) in enumerate(zip(labels, dists)):
        if not row:
            raise InputError(f"distributions[{y}] is empty")
        if lab != int(np.argmax(row)) + 1:
            raise InputError(
                f"labels[{y}] = {lab} is not the argmax of distributions[{y}]"
            )
    return doc


def generate_synthetic(
    truth: PartitionLike,
    num_workers: int,
    noise: float,
    seed: int | np.random.SeedSequence | np.random.Generator,
    worker_prefix: str = "w",
) -> Ensemble:
    """Simulate noisy workers labeling against a ground-truth partition.

    Each worker starts from the truth; every object is independently
    reassigned with probability ``noise`` to a label drawn uniformly from
    the other n-1 cluster ids.  Deterministic for a given seed.
    """
    truth = as_partition(truth)
    if not 0.0 <= noise <= 1.0:
        raise InputError(f"noise must lie in [0, 1], got {noise}")
    n = truth.k
    o = len(truth.labels)
    rng = np.random.default_rng(seed)
    base = np.asarray(truth.labels, dtype=np.int64)
    solutions = []
    for w in range(num_workers):
        labels = base
        if n > 1:
            flip = rng.random(o) < noise
            offsets = rng.integers(1, n, size=o)
            moved = ((base - 1 + offsets) % n) + 1
            labels = np.where(flip, moved, base)
        solutions.append(
            ClusteringSolution(
                f"{worker_prefix}{w + 1}", tuple(int(x) for x in labels)
            )
        )
    return Ensemble(o, n, tuple(solutions))
