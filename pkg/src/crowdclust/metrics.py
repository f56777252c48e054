"""Pair-counting indices for comparing two partitions of the same object set.

Cluster labels are 1-based integers throughout.  All four indices are
computed from exact integer pair counts; the single floating-point division
happens last, so results are reproducible bit-for-bit and can be checked
against brute-force enumeration.

The Mirkin and Hubert indices are used in their normalized pair-count
forms, MI = (b+c)/C(o,2) and HI = (a+d-b-c)/C(o,2), which satisfy the
identities MI = 1 - RI and HI = 2*RI - 1.  The unnormalized Mirkin metric
2*(b+c) is deliberately not used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import InputError, UndefinedMetricError

__all__ = [
    "Partition",
    "ContingencyTable",
    "PairCounts",
    "as_partition",
    "contingency",
    "pair_counts",
    "rand_index",
    "adjusted_rand_index",
    "mirkin_index",
    "hubert_index",
]


@dataclass(frozen=True)
class Partition:
    """A hard assignment of every object to one of ``k`` clusters.

    Attributes
    ----------
    labels : tuple of int
        Cluster id per object, each in ``[1, k]``.
    k : int
        Declared number of clusters.  Empty clusters are allowed: an id in
        ``1..k`` may be unused by ``labels``.
    """

    labels: tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        if len(self.labels) < 1:
            raise InputError("a partition must cover at least one object")
        if self.k < 1:
            raise InputError(f"cluster count must be >= 1, got {self.k}")
        for pos, lab in enumerate(self.labels):
            if not 1 <= lab <= self.k:
                raise InputError(
                    f"label {lab} at position {pos} is outside [1, {self.k}]"
                )

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_labels(cls, labels: Sequence[int], k: int | None = None) -> "Partition":
        """Build a partition, inferring ``k`` as the maximum label if omitted."""
        tup = tuple(int(x) for x in labels)
        if k is None:
            k = max(tup, default=0)
        return cls(tup, k)


PartitionLike = Union[Partition, Sequence[int]]


def as_partition(p: PartitionLike) -> Partition:
    """Coerce a raw label sequence to a :class:`Partition` (k = max label)."""
    if isinstance(p, Partition):
        return p
    return Partition.from_labels(p)


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two partitions of the same objects.

    ``counts[i, j]`` is the number of objects labeled ``i+1`` in the first
    partition and ``j+1`` in the second; the cell sum equals ``total``.
    """

    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int


class PairCounts(NamedTuple):
    """Object-pair agreement counts between two partitions.

    a: pairs co-clustered in both partitions; b: co-clustered in the first
    only; c: in the second only; d: in neither.  They always satisfy
    a + b + c + d = C(o, 2).
    """

    a: int
    b: int
    c: int
    d: int


def _tabulate(u: Partition, v: Partition) -> list[list[int]]:
    """Dense contingency counts (rows: labels of u, cols: labels of v)."""
    if len(u.labels) != len(v.labels):
        raise InputError(
            f"partition lengths differ: {len(u.labels)} != {len(v.labels)}"
        )
    rows = [[0] * v.k for _ in range(u.k)]
    for a, b in zip(u.labels, v.labels):
        rows[a - 1][b - 1] += 1
    return rows


def contingency(u: PartitionLike, v: PartitionLike) -> ContingencyTable:
    """Cross-tabulate two partitions of equal length.

    Parameters
    ----------
    u, v : Partition or sequence of int
        Partitions over the same objects (equal lengths required).

    Returns
    -------
    ContingencyTable
        A ``u.k`` x ``v.k`` integer table whose cell (i, j) counts objects
        labeled ``i`` in ``u`` and ``j`` in ``v`` (1-based ids).
    """
    u, v = as_partition(u), as_partition(v)
    counts = np.asarray(_tabulate(u, v), dtype=np.int64)
    return ContingencyTable(
        counts=counts,
        row_sums=counts.sum(axis=1),
        col_sums=counts.sum(axis=0),
        total=len(u.labels),
    )


def pair_counts(table: ContingencyTable) -> PairCounts:
    """Derive object-pair counts (a, b, c, d) from a contingency table."""
    cells = [int(x) for x in table.counts.ravel()]
    a = sum(math.comb(c, 2) for c in cells)
    b = sum(math.comb(int(r), 2) for r in table.row_sums) - a
    c = sum(math.comb(int(s), 2) for s in table.col_sums) - a
    d = math.comb(table.total, 2) - a - b - c
    return PairCounts(a, b, c, d)


def _pair_counts_fast(rows: list[list[int]], o: int) -> tuple[int, int, int, int]:
    a = 0
    row_comb = 0
    col_totals = [0] * (len(rows[0]) if rows else 0)
    for row in rows:
        rsum = 0
        for j, cell in enumerate(row):
            if cell:
                a += math.comb(cell, 2)
                rsum += cell
                col_totals[j] += cell
        row_comb += math.comb(rsum, 2)
    col_comb = sum(math.comb(c, 2) for c in col_totals)
    b = row_comb - a
    c = col_comb - a
    d = math.comb(o, 2) - a - b - c
    return a, b, c, d


def _require_pair(u: PartitionLike, v: PartitionLike) -> tuple[Partition, Partition]:
    u, v = as_partition(u), as_partition(v)
    if len(u.labels) != len(v.labels):
        raise InputError(
            f"partition lengths differ: {len(u.labels)} != {len(v.labels)}"
        )
    if len(u.labels) < 2:
        raise UndefinedMetricError(
            "pair-counting indices need at least two objects"
        )
    return u, v


def _canonical(labels: tuple[int, ...]) -> tuple[int, ...]:
    """Relabel by order of first occurrence, erasing label names."""
    seen: dict[int, int] = {}
    out = []
    for lab in labels:
        if lab not in seen:
            seen[lab] = len(seen) + 1
        out.append(seen[lab])
    return tuple(out)


def rand_index(u: PartitionLike, v: PartitionLike) -> float:
    """Rand index: the fraction of object pairs on which both partitions
    agree, (a + d) / C(o, 2).  Lies in [0, 1]; 1 means identical grouping.
    """
    u, v = _require_pair(u, v)
    a, b, c, d = _pair_counts_fast(_tabulate(u, v), len(u.labels))
    return (a + d) / (a + b + c + d)


def adjusted_rand_index(u: PartitionLike, v: PartitionLike) -> float:
    """Adjusted Rand index: pair-counting agreement corrected for chance.

    Uses the Hubert-Arabie form (index - expected) / (max - expected) with
    all binomial sums kept as exact integers; 1 means identical grouping,
    0 is chance level, and negative values mean below-chance agreement.

    When max == expected (both partitions degenerate: a single cluster, or
    all singletons) the ratio is undefined; by convention the result is 1.0
    when the two partitions group the objects identically and 0.0 otherwise.
    """
    u, v = _require_pair(u, v)
    rows = _tabulate(u, v)
    o = len(u.labels)
    index = 0
    sum_rows = 0
    col_totals = [0] * v.k
    for row in rows:
        rsum = 0
        for j, cell in enumerate(row):
            if cell:
                index += math.comb(cell, 2)
                rsum += cell
                col_totals[j] += cell
        sum_rows += math.comb(rsum, 2)
    sum_cols = sum(math.comb(c, 2) for c in col_totals)
    total = math.comb(o, 2)
    # (index - E) / (M - E) with E = sum_rows*sum_cols/total and
    # M = (sum_rows + sum_cols)/2, scaled by 2*total to stay integral.
    num = 2 * (total * index - sum_rows * sum_cols)
    den = total * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols
    if den == 0:
        return 1.0 if _canonical(u.labels) == _canonical(v.labels) else 0.0
    return num / den


def mirkin_index(u: PartitionLike, v: PartitionLike) -> float:
    """Normalized Mirkin index: disagreeing pair fraction (b + c) / C(o, 2).

    Equals 1 - rand_index; 0 means identical grouping.
    """
    u, v = _require_pair(u, v)
    a, b, c, d = _pair_counts_fast(_tabulate(u, v), len(u.labels))
    return (b + c) / (a + b + c + d)


def hubert_index(u: PartitionLike, v: PartitionLike) -> float:
    """Normalized Hubert index: signed pair agreement (a + d - b - c) / C(o, 2).

    Equals 2 * rand_index - 1 and lies in [-1, 1].
    """
    u, v = _require_pair(u, v)
    a, b, c, d = _pair_counts_fast(_tabulate(u, v), len(u.labels))
    return (a + d - b - c) / (a + b + c + d)
