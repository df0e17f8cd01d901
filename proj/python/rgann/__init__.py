"""Rule extraction from constructively trained, pruned networks."""

from ._rgann import (
    ConfigError,
    DataError,
    Network,
    RuleSet,
    RunConfig,
    RunReport,
    RunResult,
    StageError,
    cluster_node,
    load_config,
    rg,
    run_experiment,
    run_pipeline,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Network",
    "RuleSet",
    "RunConfig",
    "RunReport",
    "RunResult",
    "StageError",
    "cluster_node",
    "load_config",
    "rg",
    "run_experiment",
    "run_pipeline",
]
