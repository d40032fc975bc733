"""Seeded Lloyd clustering over flattened candidates and medoid extraction.

The loop is deliberately small: centroids start at randomly chosen
candidates, assignment is nearest-centroid in euclidean space (ties to the
lowest cluster id), and iteration stops as soon as the assignment repeats
or the iteration cap is hit. Centroids are internal bookkeeping only;
callers always execute a real candidate via the medoid helpers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientCandidatesError
from .geometry import CandidateBatch, DistanceMatrix


@dataclass(frozen=True)
class ClusterConfig:
    num_clusters: int = 2
    max_iterations: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.num_clusters < 2:
            raise ValueError("num_clusters must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class ClusterAssignment:
    labels: tuple[int, ...]
    iterations_run: int
    converged: bool
    num_clusters: int
    # within-cluster sum of squared deviations after each assign/update pass
    objective_history: tuple[float, ...] = field(default=(), repr=False)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.labels) == cluster)

    def sizes(self) -> np.ndarray:
        return np.bincount(np.asarray(self.labels), minlength=self.num_clusters)


def init_centroids(batch: CandidateBatch, config: ClusterConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw num_clusters distinct candidate indices uniformly without replacement."""
    k, c = batch.size, config.num_clusters
    if k < c:
        raise InsufficientCandidatesError(f"need at least {c} candidates, got {k}")
    return rng.choice(k, size=c, replace=False)


def _assign(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # argmin of ||p - c||^2 with the ||p||^2 term dropped; argmin returns the
    # first minimum, i.e. the lowest cluster id on ties
    scores = (centroids * centroids).sum(axis=1) - 2.0 * (x @ centroids.T)
    return np.argmin(scores, axis=1)


def _repair_empty(x: np.ndarray, labels: np.ndarray, centroids: np.ndarray, c: int) -> np.ndarray:
    """Move the point farthest from its centroid into each empty cluster."""
    labels = labels.copy()
    for cluster in range(c):
        if not (labels == cluster).any():
            dist_to_own = np.linalg.norm(x - centroids[labels], axis=1)
            # never steal the last member of another cluster
            counts = np.bincount(labels, minlength=c)
            movable = counts[labels] > 1
            dist_to_own = np.where(movable, dist_to_own, -np.inf)
            labels[int(np.argmax(dist_to_own))] = cluster
    return labels


def _objective(x: np.ndarray, labels: np.ndarray, c: int) -> float:
    total = 0.0
    for cluster in range(c):
        members = x[labels == cluster]
        if len(members):
            total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def kmeans(
    batch: CandidateBatch,
    config: ClusterConfig,
    init_indices=None,
    track_objective: bool = False,
) -> ClusterAssignment:
    """Lloyd iterations over the flattened batch, deterministic given the seed.

    init_indices overrides the seeded initialization with explicit candidate
    indices (used to enumerate starts in tests); track_objective records the
    per-iteration objective, which only diagnostics need.
    """
    x = batch.flattened()
    k, c = batch.size, config.num_clusters
    if k < c:
        raise InsufficientCandidatesError(f"need at least {c} candidates, got {k}")
    if init_indices is None:
        rng = np.random.default_rng(config.seed)
        init_indices = init_centroids(batch, config, rng)
    init_indices = np.asarray(init_indices, dtype=int)
    if len(init_indices) != c or len(set(init_indices.tolist())) != c:
        raise ValueError(f"init_indices must be {c} distinct candidate indices")

    centroids = x[init_indices].astype(np.float64, copy=True)
    labels = None
    converged = False
    iterations = 0
    history: list[float] = []
    for _ in range(config.max_iterations):
        iterations += 1
        new_labels = _assign(x, centroids)
        counts = np.bincount(new_labels, minlength=c)
        if counts.min() == 0:
            new_labels = _repair_empty(x, new_labels, centroids, c)
            counts = np.bincount(new_labels, minlength=c)
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            if track_objective:
                history.append(_objective(x, labels, c))
            break
        labels = new_labels
        onehot = np.zeros((c, k))
        onehot[labels, np.arange(k)] = 1.0
        centroids = (onehot @ x) / counts[:, None]
        if track_objective:
            history.append(_objective(x, labels, c))
    return ClusterAssignment(
        labels=tuple(int(v) for v in labels),
        iterations_run=iterations,
        converged=converged,
        num_clusters=c,
        objective_history=tuple(history),
    )


def largest_cluster(assignment: ClusterAssignment, dm: DistanceMatrix) -> int:
    """Cluster id with the most members.

    Ties go first to the cluster with the smaller total within-cluster
    pairwise distance, then to the one containing the smallest index.
    """
    labels = np.asarray(assignment.labels)
    counts = np.bincount(labels, minlength=assignment.num_clusters)
    contenders = np.flatnonzero(counts == counts.max())
    if len(contenders) == 1:
        return int(contenders[0])
    best = None
    for cluster in contenders:
        members = np.flatnonzero(labels == cluster)
        within = float(dm.values[np.ix_(members, members)].sum())
        key = (within, int(members[0]))
        if best is None or key < best[0]:
            best = (key, int(cluster))
    return best[1]


def cluster_medoid(dm: DistanceMatrix, members) -> int:
    """Member minimizing the sum of distances to the other members; ties to the smallest index."""
    members = np.asarray(sorted(int(m) for m in members))
    if len(members) == 0:
        raise ValueError("cluster_medoid called with an empty member set")
    sub = dm.values[np.ix_(members, members)]
    return int(members[int(np.argmin(sub.sum(axis=1)))])
