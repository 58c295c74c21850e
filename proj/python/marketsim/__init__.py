"""Discrete-round double-auction market simulator.

The heavy lifting lives in the C++ extension module; this package re-exports
its main operations.
"""

from marketsim._core import (
    ConfigError,
    ParseError,
    RankError,
    Scenario,
    SimulationResult,
    cosine_similarity,
    decision_sweep,
    fundamental_value,
    load_scenario,
    ols,
    parse_decision,
    parse_scenario,
    run,
)

__version__ = "1.0.0"

__all__ = [
    "ConfigError",
    "ParseError",
    "RankError",
    "Scenario",
    "SimulationResult",
    "cosine_similarity",
    "decision_sweep",
    "fundamental_value",
    "load_scenario",
    "ols",
    "parse_decision",
    "parse_scenario",
    "run",
    "__version__",
]
