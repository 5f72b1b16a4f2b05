"""Block-by-block recurrence of allocation ratios and its asymptotics."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .allocation import LpBlockInputs, lps_block_rule, traders_block_rule
from .core_model import (
    BlockState,
    MarketParams,
    ParameterError,
    Regime,
    RegimeClass,
    Trajectory,
    _check_fraction,
)

DEFAULT_MAX_BLOCKS = 100_000
DEFAULT_FIXED_POINT_TOL = 1e-12


@dataclass(frozen=True)
class SimulationConfig:
    params: MarketParams
    initial: BlockState
    max_blocks: int = DEFAULT_MAX_BLOCKS
    fixed_point_tol: float = DEFAULT_FIXED_POINT_TOL

    def __post_init__(self) -> None:
        if self.max_blocks < 1:
            raise ParameterError("max_blocks must be >= 1")
        if not self.fixed_point_tol > 0.0:
            raise ParameterError("fixed_point_tol must be positive")


class EquilibriumKind(enum.Enum):
    Monopoly = "Monopoly"
    InteriorFee = "InteriorFee"


@dataclass(frozen=True)
class EquilibriumReport:
    kind: EquilibriumKind
    t_star: float
    phi_star: float


def lp_share(t_ratio: float, params: MarketParams) -> float:
    """Reserves share the LP rule assigns to AMM a for volume share ``t_ratio``."""
    return lps_block_rule(
        LpBlockInputs(t_ratio, params.gamma, params.phi_a, params.phi_b)
    )


def consistent_state(t_ratio: float, params: MarketParams) -> BlockState:
    """State whose reserves are already in LP equilibrium with ``t_ratio``."""
    return BlockState(t_ratio, lp_share(t_ratio, params))


def step(state: BlockState, params: MarketParams) -> BlockState:
    t = traders_block_rule(state.l_ratio, params.sigma)
    return BlockState(t, lp_share(t, params))


def simulate(cfg: SimulationConfig) -> Trajectory:
    """Iterate ``step`` until both ratios move less than the tolerance."""
    params, tol = cfg.params, cfg.fixed_point_tol
    state = cfg.initial
    states = [state]
    for _ in range(cfg.max_blocks):
        nxt = step(state, params)
        states.append(nxt)
        if (
            abs(nxt.t_ratio - state.t_ratio) < tol
            and abs(nxt.l_ratio - state.l_ratio) < tol
        ):
            break
        state = nxt
    return Trajectory(cfg.initial, tuple(states))


def no_fee_closed_form(l0: float, sigma: float, i: int) -> float:
    """Reserves share after ``i`` feeless blocks under unbroken leadership of a."""
    _check_fraction("sigma", sigma)
    if not 0.5 < l0 <= 1.0:
        raise ParameterError("closed form requires l0 in (1/2, 1]")
    if i < 0:
        raise ParameterError("block index must be nonnegative")
    return 1.0 - (1.0 - sigma) ** i * (1.0 - l0)


def regime_thresholds(params: MarketParams, t0: float) -> tuple[float, float]:
    """Fee cut points ``(sigma(1-gamma)/t0, 2 sigma(1-gamma))`` between regimes."""
    s = params.sigma * (1.0 - params.gamma)
    return s / t0, 2.0 * s


def classify_regime(
    params: MarketParams, t0: float, l0: Optional[float] = None
) -> RegimeClass:
    """Asymptotic regime of the leader-fee scenario started from volume share ``t0``.

    AMM a must lead on both volume and reserves at the start; ``l0=None``
    takes the reserves share LPs settle on for ``t0``. Fees sitting exactly
    on a cut point take the closed-form interior limit. The branches are
    applied as stated even at ``t0 == 1``, although a simulation started from
    ``T = L = 1`` never leaves it.
    """
    if params.phi_b != 0.0:
        raise ParameterError("premise violated: phi_b must be 0 (leader-fee scenario)")
    if not 0.5 < t0 <= 1.0:
        raise ParameterError("premise violated: t0 must lie in (1/2, 1]")
    if l0 is None:
        l0 = lp_share(t0, params)
    if not l0 > 0.5:
        raise ParameterError(
            f"premise violated: reserves share l0={l0!r} must exceed 1/2 (market leader)"
        )
    phi = params.phi_a
    lower, upper = regime_thresholds(params, t0)
    if phi > upper:
        return RegimeClass(Regime.DecayToZero, 0.0)
    if phi >= lower:
        limit = equilibrium_ratio(phi, params.sigma, params.gamma)
        if limit < 1.0:
            return RegimeClass(Regime.InteriorLimit, limit)
        # only reachable with t0 == 1 and phi == sigma(1-gamma)
        return RegimeClass(Regime.GrowToLimit, limit)
    return RegimeClass(
        Regime.GrowToLimit, equilibrium_ratio(phi, params.sigma, params.gamma)
    )


def equilibrium_fee(t: float, sigma: float, gamma: float) -> float:
    """Leader fee that holds volume share ``t`` in place.

    Values at or above ``1 - gamma`` mean only the monopoly equilibrium exists.
    """
    if not 0.0 < t <= 1.0:
        raise ParameterError("t must lie in (0, 1]")
    return sigma * (1.0 - gamma) / t


def equilibrium_ratio(phi_a: float, sigma: float, gamma: float) -> float:
    if phi_a < 0.0:
        raise ParameterError("phi_a must be nonnegative")
    if phi_a == 0.0:
        return 1.0
    return min(1.0, sigma * (1.0 - gamma) / phi_a)


def leader_fee_equilibrium(params: MarketParams) -> EquilibriumReport:
    t_star = equilibrium_ratio(params.phi_a, params.sigma, params.gamma)
    if t_star >= 1.0:
        return EquilibriumReport(EquilibriumKind.Monopoly, 1.0, params.phi_a)
    return EquilibriumReport(EquilibriumKind.InteriorFee, t_star, params.phi_a)


def run_to_limit(
    params: MarketParams,
    t0: float,
    l0: Optional[float] = None,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
    fixed_point_tol: float = DEFAULT_FIXED_POINT_TOL,
) -> Trajectory:
    """Simulate from ``(t0, l0)``; ``l0=None`` starts LPs in equilibrium with ``t0``."""
    initial = consistent_state(t0, params) if l0 is None else BlockState(t0, l0)
    return simulate(SimulationConfig(params, initial, max_blocks, fixed_point_tol))
