"""End-to-end consensus selection: guard check, then largest-cluster medoid.

The returned chunk is always one of the inputs, never an average. With a
single candidate there is nothing to select; with a compact batch (guard
score below tau) the global medoid is returned directly; otherwise the
batch is clustered and the medoid of the largest cluster wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import ClusterAssignment, ClusterConfig, cluster_medoid, kmeans, largest_cluster
from .geometry import (
    METRICS,
    CandidateBatch,
    pairwise_distances,
    unimodality_score,
    validate_batch,
)

__all__ = ["SelectorConfig", "SelectionResult", "select", "validate_batch"]


@dataclass(frozen=True)
class SelectorConfig:
    """Selection knobs; `samples` is the draw count used by candidate sources."""

    samples: int = 16
    num_clusters: int = 2
    tau: float = 0.3
    eps: float = 1e-8
    metric: str = "euclidean"
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.num_clusters < 2:
            raise ValueError("num_clusters must be >= 2")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def replace(self, **kwargs) -> "SelectorConfig":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)


@dataclass(frozen=True)
class SelectionResult:
    selected_index: int
    guard_score: float
    unimodal: bool
    global_medoid: int
    cluster_sizes: tuple[int, ...] = ()
    assignment: ClusterAssignment | None = None
    selected_cluster: int | None = None
    used_medoid_fallback: bool = False


def select(batch: CandidateBatch, config: SelectorConfig) -> SelectionResult:
    """Pick one candidate index from the batch; pure function of (batch, config)."""
    k = batch.size
    if k == 1:
        return SelectionResult(
            selected_index=0, guard_score=0.0, unimodal=True, global_medoid=0
        )
    dm = pairwise_distances(batch, config.metric)
    score, medoid = unimodality_score(batch, dm, config.eps)
    if score < config.tau:
        return SelectionResult(
            selected_index=medoid, guard_score=score, unimodal=True, global_medoid=medoid
        )
    if k < config.num_clusters:
        return SelectionResult(
            selected_index=medoid,
            guard_score=score,
            unimodal=False,
            global_medoid=medoid,
            used_medoid_fallback=True,
        )
    assignment = kmeans(
        batch,
        ClusterConfig(num_clusters=config.num_clusters, seed=config.seed),
    )
    winner = largest_cluster(assignment, dm)
    selected = cluster_medoid(dm, assignment.members(winner))
    return SelectionResult(
        selected_index=selected,
        guard_score=score,
        unimodal=False,
        global_medoid=medoid,
        cluster_sizes=tuple(int(n) for n in assignment.sizes()),
        assignment=assignment,
        selected_cluster=winner,
    )


def selected_chunk(batch: CandidateBatch, result: SelectionResult) -> np.ndarray:
    """The actual (steps, dims) array the result points at."""
    return batch.values[result.selected_index]
