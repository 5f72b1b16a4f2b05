"""Shared domain types for two competing AMM forks.

Everything lives in ratio space: ``T`` is the share of per-block trade volume
routed to AMM ``a`` and ``L`` is its share of total reserves. The absolute
totals ``V`` and ``R`` only scale payoffs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class ParameterError(ValueError):
    """Raised when a value violates a model invariant."""


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name}: must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class MarketParams:
    sigma: float = 0.2
    gamma: float = 0.003
    phi_a: float = 0.0006
    phi_b: float = 0.0
    volume_per_block: float = 1.0
    reserves_total: float = 1.0

    def __post_init__(self) -> None:
        validate_params(self)

    @property
    def fee_ceiling(self) -> float:
        return 1.0 - self.gamma


def validate_params(p: MarketParams) -> MarketParams:
    """Return ``p`` if every invariant holds, else raise naming the first failure."""
    _check_fraction("sigma", p.sigma)
    if not 0.0 <= p.gamma < 1.0:
        raise ParameterError(f"gamma: must lie in [0, 1), got {p.gamma!r}")
    for name in ("phi_a", "phi_b"):
        fee = getattr(p, name)
        if fee < 0.0:
            raise ParameterError(f"{name}: fee must be nonnegative, got {fee!r}")
        if fee >= 1.0 - p.gamma:
            raise ParameterError(
                f"{name}: fee exceeds 1-gamma ({fee!r} >= {1.0 - p.gamma!r})"
            )
    if not p.volume_per_block > 0.0:
        raise ParameterError(
            f"volume_per_block: must be positive, got {p.volume_per_block!r}"
        )
    if not p.reserves_total > 0.0:
        raise ParameterError(
            f"reserves_total: must be positive, got {p.reserves_total!r}"
        )
    return p


@dataclass(frozen=True)
class BlockState:
    t_ratio: float
    l_ratio: float

    def __post_init__(self) -> None:
        _check_fraction("t_ratio", self.t_ratio)
        _check_fraction("l_ratio", self.l_ratio)


@dataclass(frozen=True)
class Trajectory:
    initial: BlockState
    states: tuple[BlockState, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.states:
            object.__setattr__(self, "states", (self.initial,))
        elif self.states[0] != self.initial:
            raise ParameterError("states[0] must equal the initial state")

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, i: int) -> BlockState:
        return self.states[i]

    @property
    def t(self) -> list[float]:
        return [s.t_ratio for s in self.states]

    @property
    def l(self) -> list[float]:
        return [s.l_ratio for s in self.states]

    @property
    def final(self) -> BlockState:
        return self.states[-1]


class Leader(enum.Enum):
    AmmA = "AmmA"
    AmmB = "AmmB"
    Tie = "Tie"


def leader_from_reserves(l_ratio: float) -> Leader:
    """Market leader keyed on the reserves share of AMM ``a``."""
    _check_fraction("l_ratio", l_ratio)
    if l_ratio > 0.5:
        return Leader.AmmA
    if l_ratio < 0.5:
        return Leader.AmmB
    return Leader.Tie


class Regime(enum.Enum):
    DecayToZero = "DecayToZero"
    InteriorLimit = "InteriorLimit"
    GrowToLimit = "GrowToLimit"


@dataclass(frozen=True)
class RegimeClass:
    tag: Regime
    limit_value: float

    def __post_init__(self) -> None:
        _check_fraction("limit_value", self.limit_value)
        if self.tag is Regime.DecayToZero and self.limit_value != 0.0:
            raise ParameterError("DecayToZero requires limit_value == 0")
        if self.tag is Regime.InteriorLimit and not 0.0 < self.limit_value < 1.0:
            raise ParameterError("InteriorLimit requires 0 < limit_value < 1")
