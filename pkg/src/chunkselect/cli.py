"""Command-line entry points: select, simulate, sweep, serve, bench.

Exit codes: 0 success, 1 usage error, 2 data error (missing or malformed
input files, invalid batches).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .batchio import FORMATS, parse_batch_file
from .bench import run_benchmark
from .errors import ChunkSelectError
from .geometry import METRICS, CandidateBatch
from .protocol import response_payload, serve_stdio, serve_tcp
from .scenario import load_scenario
from .selector import SelectorConfig, select
from .simulate import (
    SWEEP_HEADER,
    Consensus,
    SingleSample,
    SweepAxes,
    ablation_sweep,
    estimate_success,
    write_sweep_table,
)

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--clusters", type=int, default=2, help="number of clusters C")
    parser.add_argument("--tau", type=float, default=0.3, help="unimodality guard threshold")
    parser.add_argument("--eps", type=float, default=1e-8, help="guard denominator epsilon")
    parser.add_argument("--metric", choices=METRICS, default="euclidean")
    parser.add_argument("--seed", type=int, default=0, help="clustering init seed")


def _config_from_args(args, samples: int = 16) -> SelectorConfig:
    return SelectorConfig(
        samples=samples,
        num_clusters=args.clusters,
        tau=args.tau,
        eps=args.eps,
        metric=args.metric,
        seed=args.seed,
    )


def _open_output(spec: str):
    if spec == "stdout" or spec == "-":
        return sys.stdout, False
    return open(spec, "w"), True


def build_parser() -> _Parser:
    parser = _Parser(prog="chunkselect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="select one candidate from a batch file")
    p.add_argument("--input", required=True, help="batch file path")
    p.add_argument("--format", choices=FORMATS, default=None, help="input format (default: infer)")
    p.add_argument("--k-override", type=int, default=None, help="use only the first K candidates")
    _config_flags(p)
    p.add_argument("--output", default="stdout", help="response path or 'stdout'")

    p = sub.add_parser("simulate", help="estimate episode success for a scenario policy")
    p.add_argument("--scenario", required=True)
    p.add_argument("--episodes", type=int, default=1000, help="episodes per repeat")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", default="consensus", help="policy name from the scenario")
    p.add_argument("--output", default="stdout")

    p = sub.add_parser("sweep", help="one-knob-at-a-time ablation over a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--policy", default="consensus", help="base consensus policy name")
    p.add_argument("--metrics", default="", help="comma-separated metrics to try")
    p.add_argument("--k-values", type=_int_list, default=[], help="comma-separated sample counts")
    p.add_argument("--c-values", type=_int_list, default=[], help="comma-separated cluster counts")
    p.add_argument("--episodes", type=int, default=1000, help="episodes per repeat")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="stdout")

    p = sub.add_parser("serve", help="answer selection requests over stdio or tcp")
    p.add_argument("--transport", choices=("stdio", "tcp"), default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0, help="tcp port (0 picks a free one)")
    _config_flags(p)

    p = sub.add_parser("bench", help="selection latency percentiles")
    p.add_argument("--k-list", type=_int_list, default=[16])
    p.add_argument("--dim-list", type=_int_list, default=[2048])
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_select(args) -> int:
    batch = parse_batch_file(args.input, args.format)
    if args.k_override is not None:
        if args.k_override < 1:
            raise ChunkSelectError("--k-override must be >= 1")
        if args.k_override > batch.size:
            raise ChunkSelectError(
                f"--k-override {args.k_override} exceeds the {batch.size} candidates in the file"
            )
        batch = CandidateBatch(batch.values[: args.k_override])
    config = _config_from_args(args, samples=batch.size)
    result = select(batch, config)
    stream, close = _open_output(args.output)
    try:
        stream.write(json.dumps(response_payload(batch, result)) + "\n")
    finally:
        if close:
            stream.close()
    return 0


def _policy_row(name, policy, stats):
    if isinstance(policy, SingleSample):
        return [name, "", 1, "", "", repr(stats.mean_success), repr(stats.std_success)]
    cfg = policy.config
    return [
        name,
        cfg.metric,
        cfg.samples,
        cfg.num_clusters,
        repr(cfg.tau),
        repr(stats.mean_success),
        repr(stats.std_success),
    ]


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.policy not in scenario.policies:
        raise ChunkSelectError(
            f"policy {args.policy!r} not in scenario (has {sorted(scenario.policies)})"
        )
    policy = scenario.policies[args.policy]
    stats = estimate_success(scenario.episode, policy, args.episodes, args.repeats, args.seed)
    stream, close = _open_output(args.output)
    try:
        writer = csv.writer(stream)
        writer.writerow(SWEEP_HEADER)
        writer.writerow(_policy_row(args.policy, policy, stats))
    finally:
        if close:
            stream.close()
    return 0


def _cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.policy not in scenario.policies:
        raise ChunkSelectError(
            f"policy {args.policy!r} not in scenario (has {sorted(scenario.policies)})"
        )
    policy = scenario.policies[args.policy]
    if not isinstance(policy, Consensus):
        raise ChunkSelectError("sweep needs a consensus policy as its base config")
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    for m in metrics:
        if m not in METRICS:
            raise ChunkSelectError(f"unknown metric {m!r} in --metrics")
    axes = SweepAxes(
        metrics=metrics,
        k_values=tuple(args.k_values),
        c_values=tuple(args.c_values),
    )
    rows = ablation_sweep(
        scenario.episode, policy.config, axes, args.episodes, args.repeats, args.seed
    )
    stream, close = _open_output(args.output)
    try:
        write_sweep_table(rows, stream)
    finally:
        if close:
            stream.close()
    return 0


def _cmd_serve(args) -> int:
    defaults = _config_from_args(args)
    if args.transport == "stdio":
        serve_stdio(defaults)
    else:
        serve_tcp(args.host, args.port, defaults)
    return 0


def _cmd_bench(args) -> int:
    rows = run_benchmark(args.k_list, args.dim_list, iterations=args.iterations, seed=args.seed)
    writer = csv.writer(sys.stdout)
    writer.writerow(["K", "D", "iterations", "p50_us", "p99_us", "mean_us"])
    for row in rows:
        writer.writerow(
            [row.samples, row.dim, row.iterations,
             f"{row.p50_us:.1f}", f"{row.p99_us:.1f}", f"{row.mean_us:.1f}"]
        )
    return 0


_COMMANDS = {
    "select": _cmd_select,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "serve": _cmd_serve,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except ChunkSelectError as exc:
        print(f"chunkselect: error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
