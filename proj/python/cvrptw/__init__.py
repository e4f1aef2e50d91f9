"""Python access to the CVRP-TW solver core."""

from ._core import (
    ContractViolation,
    Network,
    ParseError,
    Problem,
    c101_25,
    check_solution,
    feature_names,
    generate_instance,
    init_network,
    initial_features,
    load_instance,
    load_network,
    parse_instance,
    solve,
    train,
)

__all__ = [
    "ContractViolation",
    "Network",
    "ParseError",
    "Problem",
    "c101_25",
    "check_solution",
    "feature_names",
    "generate_instance",
    "init_network",
    "initial_features",
    "load_instance",
    "load_network",
    "parse_instance",
    "solve",
    "train",
]
