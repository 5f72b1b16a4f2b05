"""Single-block outcomes for traders and liquidity providers."""
from __future__ import annotations

from dataclasses import dataclass

from .core_model import Leader, ParameterError, _check_fraction, leader_from_reserves


@dataclass(frozen=True)
class TraderParams:
    reserves_a: float
    reserves_b: float
    normalized_cost: float = 0.0

    def __post_init__(self) -> None:
        if not (self.reserves_a > 0.0 and self.reserves_b > 0.0):
            raise ParameterError("reserves must be positive")
        if self.normalized_cost < 0.0:
            raise ParameterError("normalized_cost must be nonnegative")

    @classmethod
    def from_raw_cost(
        cls,
        reserves_a: float,
        reserves_b: float,
        raw_cost: float,
        gamma: float,
        amm_price: float,
        trade_size: float,
    ) -> TraderParams:
        return cls(
            reserves_a,
            reserves_b,
            normalized_cost(raw_cost, gamma, amm_price, trade_size),
        )


@dataclass(frozen=True)
class LpBlockInputs:
    t_ratio: float
    gamma: float
    phi_a: float
    phi_b: float
    locked_a_floor: float = 0.0
    locked_b_floor: float = 0.0

    def __post_init__(self) -> None:
        _check_fraction("t_ratio", self.t_ratio)
        _check_fraction("locked_a_floor", self.locked_a_floor)
        _check_fraction("locked_b_floor", self.locked_b_floor)
        if self.locked_a_floor + self.locked_b_floor > 1.0:
            raise ParameterError("lock floors must sum to at most 1")

    @property
    def net_yields(self) -> tuple[float, float]:
        """LP share of fees per unit volume on each AMM."""
        return 1.0 - self.gamma - self.phi_a, 1.0 - self.gamma - self.phi_b


def trader_utility(delta: float, p: TraderParams) -> float:
    """Simplified small-trader utility of sending ``delta`` of a trade to AMM a.

    Splitting across both AMMs pays the transaction cost twice.
    """
    if not 0.0 <= delta <= 1.0:
        raise ParameterError(f"delta must lie in [0, 1], got {delta!r}")
    impact = delta**2 / p.reserves_a + (1.0 - delta) ** 2 / p.reserves_b
    cost = p.normalized_cost if delta in (0.0, 1.0) else 2.0 * p.normalized_cost
    return -impact - cost


def interior_optimum(p: TraderParams) -> float:
    return p.reserves_a / (p.reserves_a + p.reserves_b)


def corner_cost_threshold(p: TraderParams) -> float:
    """Cost above which the all-in corner on the reserves leader beats splitting.

    Requires AMM a to be the (weak) reserves leader.
    """
    ra, rb = p.reserves_a, p.reserves_b
    if ra < rb:
        raise ParameterError("corner_cost_threshold requires reserves_a >= reserves_b")
    return rb / (ra * (ra + rb))


def normalized_cost(
    raw_cost: float, gamma: float, amm_price: float, trade_size: float
) -> float:
    if amm_price <= 0.0 or trade_size <= 0.0:
        raise ParameterError("amm_price and trade_size must be positive")
    return raw_cost * gamma / (amm_price * trade_size**2)


def traders_block_rule(prev_l: float, sigma: float) -> float:
    """Volume share of AMM a after one block of trader allocation games.

    Sensitive traders go all-in on the reserves leader; the rest split in
    proportion to reserves. On an exact tie the sensitive mass splits evenly.
    """
    _check_fraction("sigma", sigma)
    leader = leader_from_reserves(prev_l)
    if leader is Leader.AmmA:
        # 1 - (1-s)(1-l) == s + (1-s)l, but keeps l == 1 exactly absorbing
        return 1.0 - (1.0 - sigma) * (1.0 - prev_l)
    if leader is Leader.AmmB:
        return (1.0 - sigma) * prev_l
    return 0.5


def lp_small_utility(
    r: float,
    r_a: float,
    v_a: float,
    v_b: float,
    R_a: float,
    R_b: float,
    gamma: float,
    phi_a: float,
    phi_b: float,
) -> float:
    if not 0.0 <= r_a <= r:
        raise ParameterError("require 0 <= r_a <= r")
    if R_a <= 0.0 or R_b <= 0.0:
        raise ParameterError("reserves must be positive")
    return (1.0 - gamma - phi_a) * v_a * r_a / R_a + (1.0 - gamma - phi_b) * v_b * (
        r - r_a
    ) / R_b


def lps_block_rule(inp: LpBlockInputs) -> float:
    """Reserves share of AMM a once small LPs equalize marginal yields.

    Free reserves settle where ``(1-gamma-phi_a) V_a / R_a`` equals the same
    quantity on AMM b; locked reserves pin the result inside
    ``[locked_a_floor, 1 - locked_b_floor]``.
    """
    a, b = inp.net_yields
    if a <= 0.0 or b <= 0.0:
        raise ParameterError("fee space exhausted: 1-gamma-phi must be positive")
    t = inp.t_ratio
    if t in (0.0, 1.0) or a == b:
        interior = t
    else:
        interior = a * t / (a * t + b * (1.0 - t))
    return min(max(interior, inp.locked_a_floor), 1.0 - inp.locked_b_floor)
