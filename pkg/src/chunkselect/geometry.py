"""Action-chunk containers and the distance/medoid/guard primitives.

A chunk is a (steps, dims) array of motor commands; a batch is K chunks of
identical shape sampled from the same context. Everything downstream
(guard score, clustering, medoid extraction) works on the flattened
(K, steps*dims) view.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BatchValidationError, DegenerateBatchError

METRICS = ("euclidean", "cosine")


@dataclass(frozen=True)
class ActionChunk:
    """One sampled command sequence, shape (steps, dims), all values finite."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise BatchValidationError(
                f"chunk must be a (steps, dims) matrix with steps >= 1 and dims >= 1, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise BatchValidationError("chunk contains a non-finite value")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def steps(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CandidateBatch:
    """K same-shape chunks held as one read-only (K, steps, dims) array."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 3:
            raise BatchValidationError(f"batch must be K x steps x dims, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise BatchValidationError("batch is empty")
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise BatchValidationError(f"chunk shape must be at least (1, 1), got {arr.shape[1:]}")
        bad = ~np.isfinite(arr).all(axis=(1, 2))
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise BatchValidationError(
                f"candidate {idx} contains a non-finite value", candidate=idx
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def steps(self) -> int:
        return self.values.shape[1]

    @property
    def dims(self) -> int:
        return self.values.shape[2]

    def chunk(self, i: int) -> ActionChunk:
        return ActionChunk(self.values[i])

    def flattened(self) -> np.ndarray:
        """(K, steps*dims) row-major view; step-major, then dimension."""
        return self.values.reshape(self.size, -1)


def validate_batch(raw) -> CandidateBatch:
    """Build a CandidateBatch from raw K x steps x dims data, reporting the first violation.

    Accepts nested sequences or an ndarray. Rejects empty batches,
    inconsistent chunk shapes, and non-finite values (naming the candidate).
    """
    if isinstance(raw, np.ndarray):
        return CandidateBatch(raw)
    candidates = list(raw)
    if len(candidates) == 0:
        raise BatchValidationError("batch is empty")
    arrays = []
    shape = None
    for i, cand in enumerate(candidates):
        try:
            arr = np.asarray(cand, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise BatchValidationError(f"candidate {i} is not numeric: {exc}", candidate=i)
        if arr.ndim != 2:
            raise BatchValidationError(
                f"candidate {i} must be a (steps, dims) matrix, got shape {arr.shape}",
                candidate=i,
            )
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise BatchValidationError(
                f"candidate {i} has shape {arr.shape}, expected {shape}", candidate=i
            )
        if not np.isfinite(arr).all():
            raise BatchValidationError(
                f"candidate {i} contains a non-finite value", candidate=i
            )
        arrays.append(arr)
    return CandidateBatch(np.stack(arrays))


def flatten(chunk: ActionChunk) -> np.ndarray:
    """Row-major flattening: step 0's dims first, then step 1's, and so on."""
    return chunk.values.reshape(-1)


@dataclass(frozen=True)
class DistanceMatrix:
    """K x K symmetric pairwise distances with a zero diagonal."""

    values: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {arr.shape}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}, expected one of {METRICS}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def pairwise_distances(batch: CandidateBatch, metric: str = "euclidean") -> DistanceMatrix:
    """All-pairs distances over flattened candidates.

    euclidean: the plain L2 norm of the difference. cosine: 1 - cos(x_i, x_j),
    where a zero-norm vector counts as orthogonal to every nonzero vector
    (distance 1) and coincident with another zero vector (distance 0).
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")
    x = batch.flattened()
    k = batch.size
    if k == 1:
        return DistanceMatrix(np.zeros((1, 1)), metric)
    if metric == "euclidean":
        return DistanceMatrix(_euclidean_matrix(x), metric)
    norms = np.linalg.norm(x, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    cos = (x @ x.T) / np.outer(safe, safe)
    d = 1.0 - cos
    # zero-norm convention: 1 against nonzero vectors, 0 between zero vectors
    d[zero, :] = 1.0
    d[:, zero] = 1.0
    zz = np.ix_(zero, zero)
    d[zz] = 0.0
    d = np.clip(d, 0.0, 2.0)
    upper = np.triu(d, 1)
    return DistanceMatrix(upper + upper.T, metric)


def _euclidean_matrix(x: np.ndarray) -> np.ndarray:
    """All-pairs L2 distances via the Gram expansion, with a direct recompute
    of near-zero entries where the expansion loses to cancellation (identical
    candidates must come out at exactly zero for the tie rules to hold)."""
    gram = x @ x.T
    norms_sq = np.diag(gram).copy()
    d_sq = norms_sq[:, None] + norms_sq[None, :] - 2.0 * gram
    # below this, expansion error can reach ~1e-8 relative in the distance;
    # recomputing directly keeps every entry within ~5e-9 relative
    suspect = d_sq <= 1e-8 * (norms_sq[:, None] + norms_sq[None, :])
    np.fill_diagonal(suspect, False)
    if suspect.any():
        for i, j in zip(*np.nonzero(np.triu(suspect, 1))):
            diff = x[i] - x[j]
            d_sq[i, j] = d_sq[j, i] = diff @ diff
    d = np.sqrt(np.maximum(d_sq, 0.0))
    upper = np.triu(d, 1)
    return upper + upper.T


def global_medoid(dm: DistanceMatrix) -> int:
    """Index minimizing the row sum of distances; ties go to the smallest index."""
    return int(np.argmin(dm.values.sum(axis=1)))


@lru_cache(maxsize=128)
def _upper_triangle_indices(k: int):
    return np.triu_indices(k, 1)


def median_pairwise(dm: DistanceMatrix) -> float:
    """Median of the strict-upper-triangle distances (mean of middles for even counts)."""
    k = dm.size
    if k < 2:
        raise DegenerateBatchError("median pairwise distance needs at least 2 candidates")
    entries = dm.values[_upper_triangle_indices(k)]
    n = len(entries)
    mid = n // 2
    if n % 2:
        return float(np.partition(entries, mid)[mid])
    part = np.partition(entries, [mid - 1, mid])
    return float((part[mid - 1] + part[mid]) / 2.0)


def unimodality_score(batch: CandidateBatch, dm: DistanceMatrix, eps: float) -> tuple[float, int]:
    """Guard score and global medoid index.

    The score is the L2 distance from the sample mean to the medoid, divided
    by the median pairwise distance plus eps. The numerator stays euclidean
    even when the matrix metric is cosine; only the denominator (and the
    medoid choice) follow the matrix.
    """
    if batch.size < 2:
        raise DegenerateBatchError("guard score needs at least 2 candidates")
    x = batch.flattened()
    medoid = global_medoid(dm)
    numerator = float(np.linalg.norm(x.mean(axis=0) - x[medoid]))
    return numerator / (median_pairwise(dm) + eps), medoid
