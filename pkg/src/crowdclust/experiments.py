"""Synthetic recovery experiments: noisy workers against a known truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alignment import align_ensemble
from .consensus import ConsensusConfig, compute_weights, consensus, plurality_baseline
from .io_formats import generate_synthetic
from .metrics import Partition, adjusted_rand_index

__all__ = ["TrialResult", "run_trial", "run_study"]


@dataclass(frozen=True)
class TrialResult:
    seed: int
    consensus_ari: float
    plurality_ari: float
    worker_aris: tuple[float, ...]

    @property
    def worker_median(self) -> float:
        return float(np.median(self.worker_aris))


def run_trial(
    num_objects: int,
    num_clusters: int,
    num_workers: int,
    noise: float,
    seed: int,
    config: ConsensusConfig | None = None,
) -> TrialResult:
    """One trial: draw a random truth, simulate workers, run the pipeline
    and the plurality baseline, and score everything by ARI to the truth."""
    cfg = config if config is not None else ConsensusConfig()
    root = np.random.SeedSequence(seed)
    truth_ss, workers_ss = root.spawn(2)
    truth_labels = np.random.default_rng(truth_ss).integers(
        1, num_clusters + 1, size=num_objects
    )
    truth = Partition(tuple(int(x) for x in truth_labels), num_clusters)

    ens = generate_synthetic(truth, num_workers, noise, workers_ss)
    result = consensus(ens, cfg)
    aligned, report = align_ensemble(ens)
    weights = compute_weights(
        aligned, floor=cfg.weight_floor, pairwise=report.pairwise_ari
    )
    plurality = plurality_baseline(aligned, weights)

    consensus_part = Partition(result.labels, num_clusters)
    plurality_part = Partition(plurality, num_clusters)
    worker_aris = tuple(
        adjusted_rand_index(s.as_partition(num_clusters), truth)
        for s in ens.solutions
    )
    return TrialResult(
        seed=seed,
        consensus_ari=adjusted_rand_index(consensus_part, truth),
        plurality_ari=adjusted_rand_index(plurality_part, truth),
        worker_aris=worker_aris,
    )


def run_study(
    num_objects: int,
    num_clusters: int,
    num_workers: int,
    noise: float,
    base_seed: int,
    trials: int,
    config: ConsensusConfig | None = None,
) -> dict:
    """Run ``trials`` independent trials (seeds base_seed..base_seed+trials-1)
    and summarize how often consensus beats the median worker and the
    plurality baseline."""
    results = [
        run_trial(num_objects, num_clusters, num_workers, noise, base_seed + i, config)
        for i in range(trials)
    ]
    ge_median = sum(r.consensus_ari >= r.worker_median for r in results)
    ge_plurality = sum(r.consensus_ari >= r.plurality_ari for r in results)
    return {
        "params": {
            "num_objects": num_objects,
            "num_clusters": num_clusters,
            "num_workers": num_workers,
            "noise": noise,
            "base_seed": base_seed,
            "trials": trials,
        },
        "trials": [
            {
                "seed": r.seed,
                "consensus_ari": r.consensus_ari,
                "plurality_ari": r.plurality_ari,
                "worker_ari_median": r.worker_median,
                "worker_ari_min": min(r.worker_aris),
                "worker_ari_max": max(r.worker_aris),
            }
            for r in results
        ],
        "summary": {
            "consensus_ge_median_fraction": ge_median / trials,
            "consensus_ge_plurality_fraction": ge_plurality / trials,
            "mean_consensus_ari": float(np.mean([r.consensus_ari for r in results])),
            "mean_plurality_ari": float(np.mean([r.plurality_ari for r in results])),
        },
    }
