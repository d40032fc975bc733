#!/usr/bin/env python3
"""Episode-level gains of consensus selection over single-sample commitment.

Runs the idealized two-mode instance at several sample counts, compares the
per-round Monte Carlo rate against the strict-majority binomial tail, and
reports episode-level means and across-repeat spreads.
"""

import argparse
import math
import sys
from pathlib import Path

from chunkselect import (
    Consensus,
    EpisodeModel,
    SelectorConfig,
    SingleSample,
    estimate_success,
)
from chunkselect.scenario import load_scenario


def binomial_majority(k: int, p: float) -> float:
    return sum(math.comb(k, j) * p**j * (1 - p) ** (k - j) for j in range(k // 2 + 1, k + 1))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--scenario",
        default=str(Path(__file__).resolve().parent.parent / "scenarios" / "idealized_majority.yaml"),
    )
    parser.add_argument("--episodes", type=int, default=1000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k-values", type=lambda s: [int(v) for v in s.split(",")], default=[4, 16])
    args = parser.parse_args()

    scenario = load_scenario(args.scenario)
    episode = scenario.episode
    one_round = EpisodeModel(rounds=episode.rounds[:1], name="one-round")
    per_draw = sum(m.weight for m in episode.rounds[0].modes if m.success)

    single_round = estimate_success(one_round, SingleSample(), args.episodes, args.repeats, args.seed)
    single_ep = estimate_success(episode, SingleSample(), args.episodes, args.repeats, args.seed)
    print(f"scenario: {scenario.name} (T={episode.num_rounds}, per-draw success {per_draw:.2f})")
    print(f"single-sample  round rate {single_round.mean_success:.4f}  "
          f"episode {single_ep.mean_success:.4f} +/- {single_ep.std_success:.4f}")

    for k in args.k_values:
        policy = Consensus(SelectorConfig(samples=k, seed=args.seed))
        round_stats = estimate_success(one_round, policy, args.episodes, args.repeats, args.seed)
        ep_stats = estimate_success(episode, policy, args.episodes, args.repeats, args.seed)
        oracle = binomial_majority(k, per_draw)
        print(
            f"consensus K={k:<3d} round rate {round_stats.mean_success:.4f} "
            f"(majority oracle {oracle:.4f})  "
            f"episode {ep_stats.mean_success:.4f} +/- {ep_stats.std_success:.4f}  "
            f"gain {ep_stats.mean_success - single_ep.mean_success:+.4f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
