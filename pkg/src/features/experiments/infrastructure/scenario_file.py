"""
Scenario files.

A scenario is a TOML document with one table per concern:

    [scenario]    name, kind, seeds, horizon_us, strategy and run-level
                  simulation fields (mode, consensus, block_interval_us, ...)
    [shards]      count, validators and shard management fields
    [network]     latency model, GST and partitions
    [crossshard]  batching, lock timeout, threshold policy
    [sync]        gossip and dispute parameters
    [workload]    transaction stream
    [adversary]   Byzantine behaviour
    [sweep]       axes of the scenario kind
"""

import logging
import tomllib
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from pydantic import ValidationError

from src.features.crossshard.domain import CrossShardConfig
from src.features.experiments.domain import ConfigError, ScenarioSpec, SweepSpec
from src.features.sharding.domain import ShardMgrConfig
from src.features.simulation.domain import AdversarySpec, NetModel, SimConfig, WorkloadSpec
from src.features.statesync.domain import SyncConfig

logger = logging.getLogger(__name__)

_NESTED = {"network", "management", "crossshard", "sync"}

_RUN_FIELDS = set(SimConfig.model_fields) - _NESTED - {"seed", "shard_count", "validators_per_shard"}

_SPEC_FIELDS = {"name", "kind", "seeds", "horizon_us", "strategy"}

_SHARD_ALIASES = {"count": "shard_count", "validators": "validators_per_shard"}

_TABLES: Dict[str, type] = {
    "network": NetModel,
    "crossshard": CrossShardConfig,
    "sync": SyncConfig,
    "workload": WorkloadSpec,
    "adversary": AdversarySpec,
    "sweep": SweepSpec,
}


def _check_keys(table: str, keys: Iterable[str], allowed: Iterable[str]) -> None:
    unknown = sorted(set(keys) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in [{table}]: {', '.join(unknown)}")


def _table(document: Dict[str, Any], name: str) -> Dict[str, Any]:
    table = document.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    return dict(table)


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in detail['loc']) or 'scenario'}: {detail['msg']}"
        for detail in error.errors()
    )


def parse_scenario(document: Dict[str, Any], default_name: Optional[str] = None) -> ScenarioSpec:
    """
    Build a ScenarioSpec from parsed scenario tables.

    Raises:
        ConfigError: Unknown tables or keys, or values that fail validation
    """
    _check_keys("document", document, {"scenario", "shards", *_TABLES})
    scenario = _table(document, "scenario")
    shards = _table(document, "shards")
    _check_keys("scenario", scenario, _SPEC_FIELDS | _RUN_FIELDS)
    _check_keys("shards", shards, set(_SHARD_ALIASES) | set(ShardMgrConfig.model_fields))
    tables = {name: _table(document, name) for name in _TABLES}
    for name, model in _TABLES.items():
        _check_keys(name, tables[name], model.model_fields)

    config = {key: value for key, value in scenario.items() if key in _RUN_FIELDS}
    for alias, field in _SHARD_ALIASES.items():
        if alias in shards:
            config[field] = shards.pop(alias)
    config.update(
        network=tables["network"],
        management=shards,
        crossshard=tables["crossshard"],
        sync=tables["sync"],
    )
    spec = {key: value for key, value in scenario.items() if key in _SPEC_FIELDS}
    spec.setdefault("name", default_name)
    try:
        return ScenarioSpec.model_validate({
            **spec,
            "config": config,
            "workload": tables["workload"],
            "adversary": tables["adversary"],
            "sweep": tables["sweep"],
        })
    except ValidationError as error:
        raise ConfigError(f"Invalid scenario: {_describe(error)}") from error


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    """Read and validate a scenario file; the file stem names an unnamed scenario."""
    path = Path(path)
    try:
        with path.open("rb") as handle:
            document = tomllib.load(handle)
    except OSError as error:
        raise ConfigError(f"Cannot read scenario file {path}: {error.strerror or error}") from error
    except tomllib.TOMLDecodeError as error:
        raise ConfigError(f"Malformed scenario file {path}: {error}") from error
    spec = parse_scenario(document, default_name=path.stem)
    logger.info("loaded scenario %s (%s) from %s", spec.name, spec.kind.value, path)
    return spec

