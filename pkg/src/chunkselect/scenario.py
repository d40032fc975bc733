"""Scenario documents: mixture geometry plus named policy configs.

A scenario is a YAML mapping declaring the chunk dimension, the round
count, per-round modes, and the policies an experiment may run. Modes may
be given once (shared by every round) or per round.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ScenarioError
from .selector import SelectorConfig
from .simulate import Consensus, EpisodeModel, ModeSpec, Policy, RoundModel, SingleSample

_SELECTOR_KEYS = {"samples", "clusters", "tau", "eps", "metric", "seed"}


@dataclass(frozen=True)
class Scenario:
    name: str
    episode: EpisodeModel
    policies: dict[str, Policy]


def _parse_mode(entry, where: str) -> ModeSpec:
    if not isinstance(entry, dict):
        raise ScenarioError(f"{where}: each mode must be a mapping")
    missing = {"center", "spread", "weight", "success"} - entry.keys()
    if missing:
        raise ScenarioError(f"{where}: mode is missing {sorted(missing)}")
    try:
        return ModeSpec(
            center=tuple(float(v) for v in entry["center"]),
            spread=float(entry["spread"]),
            weight=float(entry["weight"]),
            success=bool(entry["success"]),
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}")


def _parse_round(modes, dimension: int, where: str) -> RoundModel:
    if not isinstance(modes, list) or not modes:
        raise ScenarioError(f"{where}: expected a nonempty list of modes")
    parsed = tuple(_parse_mode(m, f"{where}, mode {i}") for i, m in enumerate(modes))
    try:
        return RoundModel(modes=parsed, dimension=dimension)
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}")


def parse_policy(entry, where: str = "policy") -> Policy:
    if not isinstance(entry, dict) or "type" not in entry:
        raise ScenarioError(f"{where}: expected a mapping with a 'type' key")
    kind = entry["type"]
    if kind == "single":
        return SingleSample()
    if kind != "consensus":
        raise ScenarioError(f"{where}: unknown policy type {kind!r}")
    unknown = set(entry) - _SELECTOR_KEYS - {"type"}
    if unknown:
        raise ScenarioError(f"{where}: unknown selector fields {sorted(unknown)}")
    kwargs = {}
    for src, dst in (
        ("samples", "samples"),
        ("clusters", "num_clusters"),
        ("tau", "tau"),
        ("eps", "eps"),
        ("metric", "metric"),
        ("seed", "seed"),
    ):
        if src in entry:
            kwargs[dst] = entry[src]
    try:
        return Consensus(SelectorConfig(**kwargs))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}")


def parse_scenario(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a mapping")
    try:
        dimension = int(doc["dimension"])
    except KeyError:
        raise ScenarioError("scenario is missing 'dimension'")
    name = str(doc.get("name", ""))

    if "round_modes" in doc:
        per_round = doc["round_modes"]
        if not isinstance(per_round, list) or not per_round:
            raise ScenarioError("'round_modes' must be a nonempty list of mode lists")
        rounds = tuple(
            _parse_round(modes, dimension, f"round {t}") for t, modes in enumerate(per_round)
        )
    elif "modes" in doc:
        try:
            t = int(doc.get("rounds", 1))
        except (TypeError, ValueError):
            raise ScenarioError("'rounds' must be an integer")
        if t < 1:
            raise ScenarioError("'rounds' must be >= 1")
        shared = _parse_round(doc["modes"], dimension, "modes")
        rounds = (shared,) * t
    else:
        raise ScenarioError("scenario needs either 'modes' or 'round_modes'")

    policies = {}
    for pname, entry in (doc.get("policies") or {}).items():
        policies[str(pname)] = parse_policy(entry, f"policy {pname!r}")
    return Scenario(name=name, episode=EpisodeModel(rounds=rounds, name=name), policies=policies)


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"could not parse {path}: {exc}")
    return parse_scenario(doc)
