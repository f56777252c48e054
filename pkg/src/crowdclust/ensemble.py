"""Crowd clustering ensembles: one label vector per worker over a shared
object set, with a cluster count fixed across all solutions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .metrics import Partition

__all__ = ["ClusteringSolution", "Ensemble"]


@dataclass(frozen=True)
class ClusteringSolution:
    """One worker's assignment of every object to a cluster id in [1, n]."""

    worker_id: str
    labels: tuple[int, ...]

    def as_partition(self, num_clusters: int) -> Partition:
        return Partition(self.labels, num_clusters)


@dataclass(frozen=True)
class Ensemble:
    """A set of clustering solutions over the same objects.

    Invariants enforced at construction: at least two solutions, at least
    two objects (pairwise similarity is undefined below two), every label
    vector has length ``num_objects`` with labels in ``[1, num_clusters]``,
    and worker ids are unique.
    """

    num_objects: int
    num_clusters: int
    solutions: tuple[ClusteringSolution, ...]

    def __post_init__(self) -> None:
        if self.num_objects < 2:
            raise InputError(
                f"an ensemble needs at least two objects, got {self.num_objects}"
            )
        if self.num_clusters < 1:
            raise InputError(
                f"cluster count must be >= 1, got {self.num_clusters}"
            )
        if len(self.solutions) < 2:
            raise InputError(
                f"an ensemble needs at least two solutions, got {len(self.solutions)}"
            )
        seen: set[str] = set()
        for idx, sol in enumerate(self.solutions):
            where = f"solutions[{idx}] (worker {sol.worker_id!r})"
            if not sol.worker_id:
                raise InputError(f"solutions[{idx}]: worker_id must be nonempty")
            if sol.worker_id in seen:
                raise InputError(f"{where}: duplicate worker_id")
            seen.add(sol.worker_id)
            if len(sol.labels) != self.num_objects:
                raise InputError(
                    f"{where}: has {len(sol.labels)} labels, expected {self.num_objects}"
                )
            for pos, lab in enumerate(sol.labels):
                if not 1 <= lab <= self.num_clusters:
                    raise InputError(
                        f"{where}: label {lab} at object {pos} is outside "
                        f"[1, {self.num_clusters}]"
                    )

    @property
    def num_solutions(self) -> int:
        return len(self.solutions)

    def labels_matrix(self) -> np.ndarray:
        """Labels as a (num_solutions, num_objects) int array."""
        return np.asarray([s.labels for s in self.solutions], dtype=np.int64)

    def partitions(self) -> list[Partition]:
        return [s.as_partition(self.num_clusters) for s in self.solutions]

    @classmethod
    def from_label_rows(
        cls,
        rows: Sequence[Sequence[int]],
        num_clusters: int | None = None,
        worker_ids: Sequence[str] | None = None,
    ) -> "Ensemble":
        """Build an ensemble from raw label rows (one row per worker).

        ``num_clusters`` defaults to the maximum label observed; worker ids
        default to ``w1``, ``w2``, ...
        """
        tup_rows = [tuple(int(x) for x in row) for row in rows]
        if not tup_rows:
            raise InputError("at least one label row is required")
        if num_clusters is None:
            num_clusters = max((max(r, default=0) for r in tup_rows), default=0)
        if worker_ids is None:
            worker_ids = [f"w{i + 1}" for i in range(len(tup_rows))]
        if len(worker_ids) != len(tup_rows):
            raise InputError(
                f"{len(worker_ids)} worker ids for {len(tup_rows)} label rows"
            )
        solutions = tuple(
            ClusteringSolution(wid, labels)
            for wid, labels in zip(worker_ids, tup_rows)
        )
        return cls(len(tup_rows[0]), num_clusters, solutions)
