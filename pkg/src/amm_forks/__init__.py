"""Block-by-block model of two competing AMM forks and the Grim Forker game."""
from .core_model import (
    BlockState,
    Leader,
    MarketParams,
    ParameterError,
    Regime,
    RegimeClass,
    Trajectory,
    leader_from_reserves,
    validate_params,
)
from .dynamics import SimulationConfig, classify_regime, simulate, step
from .stackelberg import (
    GovernanceParams,
    GrimForkerState,
    StackelbergOutcome,
    governance_best_response,
)

__all__ = [
    "BlockState",
    "GovernanceParams",
    "GrimForkerState",
    "Leader",
    "MarketParams",
    "ParameterError",
    "Regime",
    "RegimeClass",
    "SimulationConfig",
    "StackelbergOutcome",
    "Trajectory",
    "classify_regime",
    "governance_best_response",
    "leader_from_reserves",
    "simulate",
    "step",
    "validate_params",
]
