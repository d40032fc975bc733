"""Stochastic rollout simulator over labeled mixture candidate distributions.

Each round's candidate distribution is a mixture of isotropic Gaussian
modes carrying a success/failure label; an episode is a fixed sequence of
rounds and succeeds only if every executed chunk came from a success mode.
Per-round RNG streams are derived from (master seed, repeat, episode,
round), so results do not depend on execution order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import CandidateBatch
from .selector import SelectorConfig, select


@dataclass(frozen=True)
class ModeSpec:
    center: tuple[float, ...]
    spread: float
    weight: float
    success: bool

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if self.spread < 0:
            raise ValueError("spread must be >= 0")
        if not (0 < self.weight <= 1):
            raise ValueError("weight must be in (0, 1]")


@dataclass(frozen=True)
class RoundModel:
    modes: tuple[ModeSpec, ...]
    dimension: int

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("a round needs at least one mode")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        for m in self.modes:
            if len(m.center) != self.dimension:
                raise ValueError(
                    f"mode center has length {len(m.center)}, expected {self.dimension}"
                )
            if not (np.isfinite(m.center).all() and np.isfinite(m.spread)):
                raise ValueError("mode centers and spreads must be finite")
        total = sum(m.weight for m in self.modes)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"mode weights must sum to 1, got {total}")
        if not any(m.success for m in self.modes):
            raise ValueError("a round needs at least one success mode")
        # frozen after validation, so the draw path can reuse these each round
        object.__setattr__(
            self, "_cum_weights", np.cumsum([m.weight for m in self.modes])
        )
        object.__setattr__(self, "_centers", np.array([m.center for m in self.modes]))
        object.__setattr__(self, "_spreads", np.array([m.spread for m in self.modes]))
        object.__setattr__(self, "_success", np.array([m.success for m in self.modes]))


@dataclass(frozen=True)
class EpisodeModel:
    rounds: tuple[RoundModel, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if not self.rounds:
            raise ValueError("an episode needs at least one round")

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)


@dataclass(frozen=True)
class SingleSample:
    """Commit to one draw per round."""

    @property
    def draw_count(self) -> int:
        return 1


@dataclass(frozen=True)
class Consensus:
    """Draw config.samples candidates per round and run consensus selection."""

    config: SelectorConfig

    @property
    def draw_count(self) -> int:
        return self.config.samples


Policy = SingleSample | Consensus


@dataclass(frozen=True)
class RolloutStats:
    mean_success: float
    std_success: float
    repeats: int
    episodes_per_repeat: int


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent stream addressed by (master seed, key...)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key)))
    )


def draw_candidates(
    round_model: RoundModel, k: int, rng: np.random.Generator
) -> tuple[CandidateBatch, np.ndarray]:
    """Sample K chunks (shape (1, D)) and their success labels from the mixture."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cum_weights = round_model._cum_weights
    picks = np.searchsorted(cum_weights, rng.random(k), side="right")
    picks = np.minimum(picks, len(cum_weights) - 1)
    noise = rng.standard_normal((k, round_model.dimension))
    values = round_model._centers[picks] + round_model._spreads[picks, None] * noise
    return CandidateBatch(values[:, None, :]), round_model._success[picks]


def run_episode(
    episode: EpisodeModel,
    policy: Policy,
    master_seed: int,
    repeat: int = 0,
    episode_index: int = 0,
) -> bool:
    """One rollout; succeeds iff the executed chunk of every round is success-labeled."""
    for t, round_model in enumerate(episode.rounds):
        rng = derive_rng(master_seed, repeat, episode_index, t)
        batch, labels = draw_candidates(round_model, policy.draw_count, rng)
        if isinstance(policy, SingleSample):
            executed = 0
        else:
            executed = select(batch, policy.config).selected_index
        if not labels[executed]:
            return False
    return True


def estimate_success(
    episode: EpisodeModel,
    policy: Policy,
    episodes_per_repeat: int,
    repeats: int,
    seed: int,
) -> RolloutStats:
    """Mean and across-repeat std of the episode success rate; deterministic given seed."""
    if episodes_per_repeat < 1 or repeats < 1:
        raise ValueError("episodes_per_repeat and repeats must be >= 1")
    rates = np.empty(repeats)
    for r in range(repeats):
        wins = sum(
            run_episode(episode, policy, seed, repeat=r, episode_index=e)
            for e in range(episodes_per_repeat)
        )
        rates[r] = wins / episodes_per_repeat
    return RolloutStats(
        mean_success=float(rates.mean()),
        std_success=float(rates.std()),
        repeats=repeats,
        episodes_per_repeat=episodes_per_repeat,
    )


@dataclass(frozen=True)
class SweepAxes:
    metrics: tuple[str, ...] = ()
    k_values: tuple[int, ...] = ()
    c_values: tuple[int, ...] = ()

    def is_empty(self) -> bool:
        return not (self.metrics or self.k_values or self.c_values)


@dataclass(frozen=True)
class SweepRow:
    config_id: str
    metric: str
    samples: int
    clusters: int
    tau: float
    stats: RolloutStats


def ablation_sweep(
    episode: EpisodeModel,
    base: SelectorConfig,
    axes: SweepAxes,
    episodes_per_repeat: int,
    repeats: int,
    seed: int,
) -> list[SweepRow]:
    """One estimate_success run per single-knob variation of the base config.

    Every row reuses the same master seed, so rows differ only through the
    config under test. Empty axes produce the lone base-config row.
    """
    variants: list[tuple[str, SelectorConfig]] = []
    if axes.is_empty():
        variants.append(("base", base))
    for metric in axes.metrics:
        variants.append((f"metric={metric}", base.replace(metric=metric)))
    for k in axes.k_values:
        variants.append((f"K={k}", base.replace(samples=k)))
    for c in axes.c_values:
        variants.append((f"C={c}", base.replace(num_clusters=c)))
    rows = []
    for config_id, config in variants:
        stats = estimate_success(episode, Consensus(config), episodes_per_repeat, repeats, seed)
        rows.append(
            SweepRow(
                config_id=config_id,
                metric=config.metric,
                samples=config.samples,
                clusters=config.num_clusters,
                tau=config.tau,
                stats=stats,
            )
        )
    return rows


SWEEP_HEADER = ("config_id", "metric", "K", "C", "tau", "mean", "std")


def write_sweep_table(rows: list[SweepRow], stream) -> None:
    """Delimiter-separated table with a header row."""
    writer = csv.writer(stream)
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.config_id,
                row.metric,
                row.samples,
                row.clusters,
                repr(row.tau),
                repr(row.stats.mean_success),
                repr(row.stats.std_success),
            ]
        )
