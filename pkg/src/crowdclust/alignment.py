"""Label correspondence across an ensemble.

Cluster ids assigned by independent workers are arbitrary names: two
identical groupings may use different ids.  This module picks the reference
solution (the one with maximum mean adjusted Rand similarity to the rest)
and remaps every other solution's ids onto the reference's scheme via a
maximum-weight matching on their contingency table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .ensemble import ClusteringSolution, Ensemble
from .errors import InputError
from .metrics import Partition, adjusted_rand_index, contingency

__all__ = [
    "AlignmentReport",
    "pairwise_ari_matrix",
    "mean_ari_to_others",
    "select_reference",
    "relabel",
    "align_ensemble",
]


@dataclass(frozen=True)
class AlignmentReport:
    """Outcome of aligning an ensemble.

    ``reference_index`` is the 1-based position of the reference solution.
    ``permutations[i]`` maps the original cluster ids of solution ``i``:
    old id ``c`` becomes ``permutations[i][c - 1]``.  The reference's entry
    is the identity.
    """

    reference_index: int
    pairwise_ari: np.ndarray
    permutations: tuple[tuple[int, ...], ...]


def pairwise_ari_matrix(e: Ensemble) -> np.ndarray:
    """Symmetric (p, p) matrix of pairwise adjusted Rand indices, unit diagonal."""
    p = e.num_solutions
    parts = e.partitions()
    m = np.ones((p, p))
    for i in range(p):
        for j in range(i + 1, p):
            m[i, j] = m[j, i] = adjusted_rand_index(parts[i], parts[j])
    return m


def mean_ari_to_others(pairwise: np.ndarray) -> np.ndarray:
    """Per-solution mean ARI against the other solutions (the raw weights)."""
    p = pairwise.shape[0]
    off = pairwise.copy()
    np.fill_diagonal(off, 0.0)
    return off.sum(axis=1) / (p - 1)


def select_reference(e: Ensemble, pairwise: np.ndarray | None = None) -> int:
    """1-based index of the solution with maximum mean ARI to the others.

    Ties resolve to the smallest index.  Selection uses the raw means
    (no clamping or normalization), so it is unaffected by the weight
    clamping applied later in the consensus step.
    """
    if pairwise is None:
        pairwise = pairwise_ari_matrix(e)
    means = mean_ari_to_others(pairwise)
    return int(np.argmax(means)) + 1


def _matching_weight(table: np.ndarray) -> int:
    if table.size == 0:
        return 0
    rows, cols = linear_sum_assignment(table, maximize=True)
    return int(table[rows, cols].sum())


def _lexicographic_best_mapping(table: np.ndarray) -> tuple[int, ...]:
    """Maximum-weight perfect matching on an n x n integer table.

    Returns the mapping (pi(1), ..., pi(n)) with row i matched to column
    pi(i); among all maximum-weight matchings, the lexicographically
    smallest mapping is returned.  Resolved by fixing rows left to right:
    a column is accepted for row i iff some completion over the remaining
    rows still attains the global optimum (checked exactly on integers).
    """
    n = table.shape[0]
    target = _matching_weight(table)
    mapping: list[int] = []
    free = list(range(n))
    fixed = 0
    for i in range(n):
        rest_rows = np.arange(i + 1, n)
        for pos, j in enumerate(free):
            rest_cols = free[:pos] + free[pos + 1:]
            rest = _matching_weight(table[np.ix_(rest_rows, rest_cols)])
            if fixed + int(table[i, j]) + rest == target:
                mapping.append(j)
                fixed += int(table[i, j])
                free.pop(pos)
                break
    return tuple(m + 1 for m in mapping)


def relabel(
    solution: ClusteringSolution,
    reference: ClusteringSolution,
    num_clusters: int,
) -> tuple[ClusteringSolution, tuple[int, ...]]:
    """Remap a solution's cluster ids onto the reference's labeling scheme.

    The bijection pi of {1..n} maximizing the total overlap
    sum_i contingency(solution, reference)[i, pi(i)] is applied to the
    solution's labels (ids unused by either side participate with zero
    weight).  Ties resolve to the lexicographically smallest mapping.

    Returns the relabeled solution and the mapping.
    """
    if len(solution.labels) != len(reference.labels):
        raise InputError(
            f"solution has {len(solution.labels)} labels, "
            f"reference has {len(reference.labels)}"
        )
    table = contingency(
        Partition(solution.labels, num_clusters),
        Partition(reference.labels, num_clusters),
    ).counts
    mapping = _lexicographic_best_mapping(table)
    relabeled = tuple(mapping[lab - 1] for lab in solution.labels)
    return ClusteringSolution(solution.worker_id, relabeled), mapping


def align_ensemble(e: Ensemble) -> tuple[Ensemble, AlignmentReport]:
    """Relabel every solution against the selected reference.

    The reference solution is kept verbatim (identity mapping); every other
    solution is remapped by :func:`relabel`.
    """
    pairwise = pairwise_ari_matrix(e)
    ref_index = select_reference(e, pairwise)
    reference = e.solutions[ref_index - 1]
    identity = tuple(range(1, e.num_clusters + 1))

    aligned: list[ClusteringSolution] = []
    mappings: list[tuple[int, ...]] = []
    for idx, sol in enumerate(e.solutions):
        if idx == ref_index - 1:
            aligned.append(sol)
            mappings.append(identity)
        else:
            new_sol, mapping = relabel(sol, reference, e.num_clusters)
            aligned.append(new_sol)
            mappings.append(mapping)

    aligned_ensemble = Ensemble(e.num_objects, e.num_clusters, tuple(aligned))
    report = AlignmentReport(ref_index, pairwise, tuple(mappings))
    return aligned_ensemble, report
