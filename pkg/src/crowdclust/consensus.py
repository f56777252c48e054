"""Markov-chain consensus over an aligned ensemble.

For every object a small Markov chain over the cluster ids is built: each
solution in turn acts as the reference state and every other solution
contributes its normalized weight to the transition from the reference's
label to its own label.  The chain is made ergodic, its stationary
distribution is found by power iteration, and the argmax state becomes the
object's consensus label.

Transition matrices are plain (n, n) float arrays; rows index the source
state (cluster id - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alignment import align_ensemble, mean_ari_to_others, pairwise_ari_matrix
from .ensemble import Ensemble
from .errors import InputError

__all__ = [
    "ConsensusConfig",
    "WeightVector",
    "StationaryDistribution",
    "ConsensusResult",
    "compute_weights",
    "build_transition_matrix",
    "make_ergodic",
    "stationary_distribution",
    "assign_label",
    "consensus",
    "plurality_baseline",
]


@dataclass(frozen=True)
class ConsensusConfig:
    """Numerical knobs for the consensus pipeline.

    tolerance / max_iterations bound the power iteration; damping blends the
    transition matrix with the uniform matrix ((1-a)*T + a/n) to guarantee a
    unique stationary distribution (0 disables the blend and reproduces the
    bare ergodic fixup); weight_floor is the lower clamp applied to raw
    solution weights before normalization.
    """

    tolerance: float = 1e-10
    max_iterations: int = 1000
    damping: float = 1e-6
    weight_floor: float = 0.0

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise InputError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise InputError(
                f"max_iterations must be >= 1, got {self.max_iterations}"
            )
        if not 0.0 <= self.damping < 1.0:
            raise InputError(f"damping must lie in [0, 1), got {self.damping}")
        if self.weight_floor < 0:
            raise InputError(
                f"weight_floor must be >= 0, got {self.weight_floor}"
            )


@dataclass(frozen=True)
class WeightVector:
    """Per-solution weights: raw mean ARIs and their clamped, normalized form."""

    raw: np.ndarray
    normalized: np.ndarray

    def __post_init__(self) -> None:
        if (self.normalized < 0).any():
            raise InputError("normalized weights must be nonnegative")
        if abs(float(self.normalized.sum()) - 1.0) > 1e-12:
            raise InputError("normalized weights must sum to 1")


@dataclass(frozen=True)
class StationaryDistribution:
    """A stationary probability vector and the iteration count that produced it."""

    probs: np.ndarray
    iterations_used: int


@dataclass(frozen=True)
class ConsensusResult:
    """Consensus labels plus per-object diagnostics.

    ``labels[y]`` is the argmax (smallest index on ties) of
    ``distributions[y]``; ``reference_index`` is 1-based.
    """

    labels: tuple[int, ...]
    distributions: np.ndarray
    weights: WeightVector
    reference_index: int
    iterations: tuple[int, ...]


def compute_weights(
    e: Ensemble,
    floor: float = 0.0,
    pairwise: np.ndarray | None = None,
) -> WeightVector:
    """Weight each solution by its mean ARI to the other solutions.

    Raw values below ``floor`` (default 0) are clamped up to it before
    normalization; if the clamped values sum to zero the weights fall back
    to uniform 1/p.  Passing a precomputed pairwise ARI matrix avoids
    recomputation; ARI is invariant under relabeling, so aligned and
    unaligned ensembles give identical weights.
    """
    if pairwise is None:
        pairwise = pairwise_ari_matrix(e)
    raw = mean_ari_to_others(pairwise)
    clamped = np.maximum(raw, floor)
    total = float(clamped.sum())
    if total <= 0.0:
        normalized = np.full(len(raw), 1.0 / len(raw))
    else:
        normalized = clamped / total
    return WeightVector(raw=raw, normalized=normalized)


def _transition_from_column(labels: np.ndarray, w: np.ndarray, n: int) -> np.ndarray:
    # T[i, j] = sum of w[m] over ordered pairs (k, m), k != m, with
    # labels[k] = i+1 and labels[m] = j+1.  Closed form: outer(count, mass)
    # minus the excluded k == m pairs, which sit on the diagonal.
    idx = labels - 1
    counts = np.bincount(idx, minlength=n).astype(float)
    mass = np.zeros(n)
    np.add.at(mass, idx, w)
    t = np.outer(counts, mass)
    t[np.arange(n), np.arange(n)] -= mass
    return t


def build_transition_matrix(
    aligned: Ensemble, weights: WeightVector, object_index: int
) -> np.ndarray:
    """Per-object transition matrix from an aligned ensemble.

    ``object_index`` is 1-based.  For every ordered pair of solutions
    (k, m), k != m, the cell (label_k, label_m) at this object accumulates
    the normalized weight of solution m.  The ensemble must already be
    aligned; this is a precondition the matrix cannot reveal after the fact.
    """
    if not 1 <= object_index <= aligned.num_objects:
        raise InputError(
            f"object index {object_index} outside [1, {aligned.num_objects}]"
        )
    labels = np.asarray(
        [s.labels[object_index - 1] for s in aligned.solutions], dtype=np.int64
    )
    return _transition_from_column(labels, weights.normalized, aligned.num_clusters)


def make_ergodic(t: np.ndarray, damping: float = 0.0) -> np.ndarray:
    """Turn a nonnegative matrix into a row-stochastic one.

    Rows summing to more than 1 are first scaled down to sum 1 (preserving
    within-row proportions); then every row i gains (1 - rowsum_i)/n in each
    entry, which lifts deficient rows (a zero row becomes uniform) and is a
    no-op for rows already summing to 1.  With ``damping`` a > 0 the result
    is blended with the uniform matrix, (1-a)*T + a/n, making every entry
    strictly positive.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise InputError(f"transition matrix must be square, got shape {t.shape}")
    if (t < 0).any():
        raise InputError("transition matrix entries must be nonnegative")
    if not 0.0 <= damping < 1.0:
        raise InputError(f"damping must lie in [0, 1), got {damping}")
    n = t.shape[0]
    sums = t.sum(axis=1, keepdims=True)
    scale = np.where(sums > 1.0, sums, 1.0)
    scaled = t / scale
    lift = (1.0 - scaled.sum(axis=1, keepdims=True)) / n
    out = np.clip(scaled + lift, 0.0, None)
    if damping:
        out = (1.0 - damping) * out + damping / n
    return out


def stationary_distribution(
    t: np.ndarray, config: ConsensusConfig | None = None
) -> StationaryDistribution:
    """Power-iterate sd <- sd*T from the uniform start until the L1 change
    drops below the tolerance or max_iterations is hit.

    The vector is renormalized to sum 1 after every step to suppress drift.
    """
    cfg = config if config is not None else ConsensusConfig()
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise InputError(f"transition matrix must be square, got shape {t.shape}")
    n = t.shape[0]
    if (t < 0).any() or np.abs(t.sum(axis=1) - 1.0).max() > 1e-9:
        raise InputError("matrix is not row-stochastic")
    sd = np.full(n, 1.0 / n)
    used = 0
    for used in range(1, cfg.max_iterations + 1):
        nxt = sd @ t
        total = nxt.sum()
        if total > 0:
            nxt = nxt / total
        delta = float(np.abs(nxt - sd).sum())
        sd = nxt
        if delta < cfg.tolerance:
            break
    return StationaryDistribution(probs=sd, iterations_used=used)


def assign_label(sd: StationaryDistribution | np.ndarray) -> int:
    """1-based argmax of a distribution; ties resolve to the smallest index."""
    probs = sd.probs if isinstance(sd, StationaryDistribution) else np.asarray(sd)
    return int(np.argmax(probs)) + 1


def consensus(e: Ensemble, config: ConsensusConfig | None = None) -> ConsensusResult:
    """Full pipeline: align, weight, then per object build the transition
    matrix, make it ergodic, find its stationary distribution, and take the
    argmax as the consensus label.

    Per-object computations are independent of each other and of evaluation
    order; they are run sequentially here.
    """
    cfg = config if config is not None else ConsensusConfig()
    aligned, report = align_ensemble(e)
    weights = compute_weights(
        aligned, floor=cfg.weight_floor, pairwise=report.pairwise_ari
    )
    labels_matrix = aligned.labels_matrix()
    n = e.num_clusters

    labels: list[int] = []
    dists = np.empty((e.num_objects, n))
    iterations: list[int] = []
    for y in range(e.num_objects):
        t = _transition_from_column(labels_matrix[:, y], weights.normalized, n)
        t = make_ergodic(t, cfg.damping)
        sd = stationary_distribution(t, cfg)
        labels.append(assign_label(sd))
        dists[y] = sd.probs
        iterations.append(sd.iterations_used)

    return ConsensusResult(
        labels=tuple(labels),
        distributions=dists,
        weights=weights,
        reference_index=report.reference_index,
        iterations=tuple(iterations),
    )


def plurality_baseline(aligned: Ensemble, weights: WeightVector) -> tuple[int, ...]:
    """Weighted plurality vote per object over an aligned ensemble.

    Each object takes the label with the greatest total normalized weight;
    ties resolve to the smallest label.  Used as a comparison baseline for
    the Markov-chain pipeline.
    """
    labels_matrix = aligned.labels_matrix()
    n = aligned.num_clusters
    out: list[int] = []
    for y in range(aligned.num_objects):
        scores = np.zeros(n)
        np.add.at(scores, labels_matrix[:, y] - 1, weights.normalized)
        out.append(int(np.argmax(scores)) + 1)
    return tuple(out)
