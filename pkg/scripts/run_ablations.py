#!/usr/bin/env python3
"""One-knob-at-a-time ablations over the bundled planted scenarios.

Produces one table per axis (distance metric, sample count, cluster count)
in the standard sweep format, plus the single-sample baseline row used to
read off gains.
"""

import argparse
import sys
from pathlib import Path

from chunkselect import SingleSample, SweepAxes, ablation_sweep, estimate_success
from chunkselect.scenario import load_scenario
from chunkselect.simulate import write_sweep_table

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

AXES = (
    ("cosine_decoy.yaml", SweepAxes(metrics=("euclidean", "cosine"))),
    ("idealized_majority.yaml", SweepAxes(c_values=(2, 4))),
    ("saturated_sampling.yaml", SweepAxes(k_values=(16, 32))),
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--episodes", type=int, default=600)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default=None, help="write tables here instead of stdout")
    args = parser.parse_args()

    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    for filename, axes in AXES:
        scenario = load_scenario(SCENARIO_DIR / filename)
        base = scenario.policies["consensus"].config
        rows = ablation_sweep(
            scenario.episode, base, axes, args.episodes, args.repeats, args.seed
        )
        baseline = estimate_success(
            scenario.episode, SingleSample(), args.episodes, args.repeats, args.seed
        )
        print(f"# {scenario.name}: single-sample baseline "
              f"{baseline.mean_success:.4f} +/- {baseline.std_success:.4f}")
        if out_dir:
            with open(out_dir / f"{scenario.name}.csv", "w") as fh:
                write_sweep_table(rows, fh)
            print(f"# wrote {out_dir / f'{scenario.name}.csv'}")
        else:
            write_sweep_table(rows, sys.stdout)
        for row in rows:
            gain = row.stats.mean_success - baseline.mean_success
            print(f"#   {row.config_id}: gain {gain:+.4f}")
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
