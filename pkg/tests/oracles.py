"""Independent brute-force references used only by the test suite.

These deliberately share no code with the package: the medoid oracle is a
plain-Python double loop, the partition oracle enumerates every split, and
the episode/binomial oracles are closed-form sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OracleReport:
    case_id: str
    oracle_value: object
    candidate_value: object
    tolerance: float
    match: bool

    @classmethod
    def check(cls, case_id, oracle_value, candidate_value, tolerance=0.0):
        if tolerance == 0.0:
            match = oracle_value == candidate_value
        else:
            match = abs(oracle_value - candidate_value) <= tolerance
        return cls(case_id, oracle_value, candidate_value, tolerance, match)


def brute_medoid(candidates) -> int:
    """Double-loop row-sum argmin over flattened candidates; ties to the smallest index."""
    flats = []
    for cand in candidates:
        flat = []
        for row in cand:
            for v in row:
                flat.append(float(v))
        flats.append(flat)
    best_index, best_sum = 0, None
    for i, xi in enumerate(flats):
        total = 0.0
        for xj in flats:
            total += math.sqrt(sum((a - b) ** 2 for a, b in zip(xi, xj)))
        if best_sum is None or total < best_sum:
            best_index, best_sum = i, total
    return best_index


def best_two_partition(points) -> tuple[frozenset[frozenset[int]], float]:
    """Exhaustive optimal 2-partition by within-cluster sum of squared deviations.

    Enumerates all 2**(K-1) - 1 splits (candidate 0 pinned to one side).
    Returns the partition as a set of two index sets plus its objective.
    """
    x = np.asarray(points, dtype=np.float64).reshape(len(points), -1)
    k = len(x)
    if not (2 <= k <= 14):
        raise ValueError("best_two_partition supports 2 <= K <= 14")
    sq = (x**2).sum(axis=1)
    # masks over candidates 1..K-1; candidate 0 always in the complement side
    masks = np.arange(1, 2 ** (k - 1), dtype=np.uint64)
    member = ((masks[:, None] >> np.arange(k - 1, dtype=np.uint64)) & 1).astype(np.float64)
    member = np.concatenate([np.zeros((len(masks), 1)), member], axis=1)
    counts_a = member.sum(axis=1)
    counts_b = k - counts_a
    sums_a = member @ x
    sums_b = x.sum(axis=0) - sums_a
    sq_a = member @ sq
    sq_b = sq.sum() - sq_a
    obj = (
        sq_a
        - (sums_a**2).sum(axis=1) / counts_a
        + sq_b
        - (sums_b**2).sum(axis=1) / counts_b
    )
    best = int(np.argmin(obj))
    side_a = frozenset(int(i) for i in np.flatnonzero(member[best]))
    side_b = frozenset(range(k)) - side_a
    return frozenset({side_a, side_b}), float(obj[best])


def partition_objective(points, groups) -> float:
    """Within-cluster sum of squared deviations of an explicit partition."""
    x = np.asarray(points, dtype=np.float64).reshape(len(points), -1)
    total = 0.0
    for group in groups:
        idx = sorted(group)
        if idx:
            members = x[idx]
            total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def binomial_majority(k: int, p: float) -> float:
    """Probability of a strict majority of successes among k draws."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must be in [0, 1]")
    return sum(
        math.comb(k, j) * p**j * (1 - p) ** (k - j) for j in range(k // 2 + 1, k + 1)
    )


def binomial_pmf(k: int, j: int, p: float) -> float:
    return math.comb(k, j) * p**j * (1 - p) ** (k - j)


def episode_closed_form(per_round_success) -> float:
    """Probability that every round succeeds: the plain product."""
    result = 1.0
    for p in per_round_success:
        if not (0.0 <= p <= 1.0):
            raise ValueError("per-round probabilities must be in [0, 1]")
        result *= p
    return result
