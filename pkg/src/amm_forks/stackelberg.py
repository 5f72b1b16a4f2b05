"""Governance fee setting against a Grim Forker commitment contract.

Before any fork there is a single governed AMM holding all volume and
reserves, so ``T = L = 1``. The Grim Forker vault holds a share ``participation``
of the reserves. Once governance charges more than ``phi_threshold`` while the
vault holds a strict majority, the vault moves its reserves into a feeless fork
(locked for ``lock_blocks``). From then on the two AMMs compete under the usual
block dynamics, with the governed AMM in slot ``a``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .allocation import LpBlockInputs, lps_block_rule, traders_block_rule
from .core_model import BlockState, MarketParams, ParameterError, _check_fraction
from .dynamics import step

FeePath = Union[float, Callable[[int], float]]

MONOPOLY = BlockState(1.0, 1.0)


@dataclass(frozen=True)
class GovernanceParams:
    eta: float = 0.99
    fee_grid_step: float = 1e-4
    horizon_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not 0.0 < self.eta < 1.0:
            raise ParameterError(f"eta: must lie in (0, 1), got {self.eta!r}")
        if not self.fee_grid_step > 0.0:
            raise ParameterError("fee_grid_step must be positive")
        if not self.horizon_tol > 0.0:
            raise ParameterError("horizon_tol must be positive")


@dataclass(frozen=True)
class GrimForkerState:
    phi_threshold: float
    participation: float
    lock_blocks: Optional[int] = None  # None: locked forever
    forked: bool = False
    fork_block: Optional[int] = None

    def __post_init__(self) -> None:
        if self.phi_threshold < 0.0:
            raise ParameterError("phi_threshold must be nonnegative")
        _check_fraction("participation", self.participation)
        if self.lock_blocks is not None and self.lock_blocks < 0:
            raise ParameterError("lock_blocks must be nonnegative or None")
        if self.forked != (self.fork_block is not None):
            raise ParameterError("forked must be set exactly when fork_block is")

    @property
    def threat_active(self) -> bool:
        return self.participation > 0.5

    def lock_active(self, block: int) -> bool:
        if not self.forked:
            return False
        if self.lock_blocks is None:
            return True
        return block - self.fork_block < self.lock_blocks


@dataclass(frozen=True)
class StackelbergOutcome:
    best_fee: float
    fork_happens: bool
    prevent_payoff: float
    fork_payoff: float
    fork_best_fee: float
    threat_active: bool = True


def governance_block_payoff(phi: float, v_gov: float) -> float:
    return phi * v_gov


def prevent_fork_payoff(phi_threshold: float, v: float, eta: float) -> float:
    """Discounted revenue from charging exactly the threshold forever."""
    if not 0.0 < eta < 1.0:
        raise ParameterError(f"eta: must lie in (0, 1), got {eta!r}")
    return phi_threshold * v / (1.0 - eta)


def forking_trigger(phi_gov: float, gf: GrimForkerState) -> bool:
    if gf.forked:
        raise ParameterError("forking_trigger called on an already forked contract")
    return phi_gov > gf.phi_threshold and gf.participation > 0.5


def fork_block_step(
    state: BlockState,
    params: MarketParams,
    gf: GrimForkerState,
    phi_gov: float,
    block: int = 0,
) -> tuple[BlockState, GrimForkerState]:
    """One block of the fork-aware allocation game.

    AMM a is the governed AMM charging ``phi_gov``; AMM b is the fork, feeless.
    """
    gov_params = dataclasses.replace(params, phi_a=phi_gov, phi_b=0.0)
    l_prev = state.l_ratio
    if not gf.forked:
        if not forking_trigger(phi_gov, gf):
            return step(state, gov_params), gf
        gf = dataclasses.replace(gf, forked=True, fork_block=block)
        l_prev = min(l_prev, 1.0 - gf.participation)
    t = traders_block_rule(l_prev, params.sigma)
    floor_b = gf.participation if gf.lock_active(block) else 0.0
    l = lps_block_rule(
        LpBlockInputs(t, params.gamma, phi_gov, 0.0, locked_b_floor=floor_b)
    )
    return BlockState(t, l), gf


def horizon_blocks(phi_max: float, v: float, eta: float, tol: float) -> int:
    """Smallest N whose discounted tail ``phi_max v eta^N / (1-eta)`` is below ``tol``."""
    scale = phi_max * v / (1.0 - eta)
    if scale < tol:
        return 0
    n = math.floor(math.log(tol / scale) / math.log(eta)) + 1
    while scale * eta**n >= tol:
        n += 1
    return max(n, 0)


def _fee_at(fee_path: FeePath, i: int) -> float:
    return fee_path(i) if callable(fee_path) else float(fee_path)


def discounted_governance_utility(
    fee_path: FeePath,
    params: MarketParams,
    gf: GrimForkerState,
    gov: GovernanceParams,
    initial: BlockState = MONOPOLY,
) -> float:
    """Truncated sum of ``phi_i T_i V eta^i`` along the fork-aware trajectory.

    ``fee_path`` is a constant fee or a callable from block index to fee.
    """
    v = params.volume_per_block
    phi_max = params.fee_ceiling if callable(fee_path) else float(fee_path)
    n = horizon_blocks(phi_max, v, gov.eta, gov.horizon_tol)
    state, total, weight = initial, 0.0, 1.0
    for i in range(n):
        phi = _fee_at(fee_path, i)
        state, gf = fork_block_step(state, params, gf, phi, i)
        total += governance_block_payoff(phi, state.t_ratio * v) * weight
        weight *= gov.eta
    return total


def fee_grid(lo: float, hi: float, step_size: float, include_lo: bool) -> np.ndarray:
    """Grid ``lo + k*step`` inside ``[lo, hi)`` (or ``(lo, hi)``)."""
    start = 0 if include_lo else 1
    k = np.arange(start, math.ceil((hi - lo) / step_size) + 1)
    grid = lo + k * step_size
    return grid[grid < hi]


def fork_branch_payoffs(
    fees: np.ndarray,
    params: MarketParams,
    gf: GrimForkerState,
    gov: GovernanceParams,
) -> np.ndarray:
    """Discounted governance revenue for each constant fee, forking at block 0.

    Vectorised over candidate fees; per-element arithmetic mirrors
    ``fork_block_step`` on a fork triggered in the first block.
    """
    fees = np.asarray(fees, dtype=float)
    if fees.size == 0:
        return fees.copy()
    sigma, gamma, rho = params.sigma, params.gamma, gf.participation
    v = params.volume_per_block
    a = 1.0 - gamma - fees
    b = 1.0 - gamma
    fees_max = float(fees.max())
    n = horizon_blocks(fees_max, v, gov.eta, gov.horizon_tol)
    l = np.full_like(fees, min(1.0, 1.0 - rho))
    total = np.zeros_like(fees)
    weight = 1.0
    for i in range(n):
        t = np.where(
            l > 0.5,
            1.0 - (1.0 - sigma) * (1.0 - l),
            np.where(l < 0.5, (1.0 - sigma) * l, 0.5),
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            interior = np.where(
                t == 0.0, 0.0, np.where(t == 1.0, 1.0, a * t / (a * t + b * (1.0 - t)))
            )
        cap = 1.0 - rho if gf.lock_blocks is None or i < gf.lock_blocks else 1.0
        l = np.minimum(interior, cap)
        total += fees * t * v * weight
        weight *= gov.eta
        # rho > 1/2 keeps AMM a a reserves follower after the fork, so T never
        # rises again and the tail is bounded by the current max T.
        if rho > 0.5 and fees_max * v * float(t.max()) * weight / (1.0 - gov.eta) < gov.horizon_tol:
            break
    return total


def governance_best_response(
    params: MarketParams, gf: GrimForkerState, gov: GovernanceParams
) -> StackelbergOutcome:
    """Governance's choice between staying at the threshold and provoking the fork.

    The fork branch searches constant fees strictly above the threshold; ties
    go to prevention and, within the grid, to the lowest fee.
    """
    v, ceiling = params.volume_per_block, params.fee_ceiling
    if not gf.threat_active:
        grid = fee_grid(0.0, ceiling, gov.fee_grid_step, include_lo=True)
        best = float(grid[-1])
        return StackelbergOutcome(
            best_fee=best,
            fork_happens=False,
            prevent_payoff=prevent_fork_payoff(best, v, gov.eta),
            fork_payoff=math.nan,
            fork_best_fee=math.nan,
            threat_active=False,
        )
    prevent = prevent_fork_payoff(gf.phi_threshold, v, gov.eta)
    grid = fee_grid(gf.phi_threshold, ceiling, gov.fee_grid_step, include_lo=False)
    if grid.size == 0:
        return StackelbergOutcome(
            gf.phi_threshold, False, prevent, math.nan, math.nan, True
        )
    payoffs = fork_branch_payoffs(grid, params, gf, gov)
    k = int(np.argmax(payoffs))
    fork_payoff, fork_fee = float(payoffs[k]), float(grid[k])
    fork_happens = fork_payoff > prevent
    return StackelbergOutcome(
        best_fee=fork_fee if fork_happens else gf.phi_threshold,
        fork_happens=fork_happens,
        prevent_payoff=prevent,
        fork_payoff=fork_payoff,
        fork_best_fee=fork_fee,
    )


def lp_participation_rational(
    no_governance_conflict: bool, believes_prevention: bool
) -> bool:
    return bool(no_governance_conflict and believes_prevention)


def _yield_per_reserve(net: float, vol: float, res: float) -> float:
    if res == 0.0:
        return 0.0 if vol == 0.0 else math.inf
    return net * vol / res


def lp_yield_indifference(
    t: float, l: float, params: MarketParams, forked: bool = False
) -> tuple[float, float]:
    """Per-unit-reserve LP yield via the vault and via direct allocation.

    Before the fork the vault sits in the same AMM as direct LPs, so both
    yields coincide. After the fork the vault's reserves earn on the fork
    (slot b) while direct reserves stay in the governed AMM (slot a).
    """
    _check_fraction("t", t)
    _check_fraction("l", l)
    v, r = params.volume_per_block, params.reserves_total
    direct = _yield_per_reserve(
        1.0 - params.gamma - params.phi_a, t * v, l * r
    )
    if not forked:
        return direct, direct
    vault = _yield_per_reserve(
        1.0 - params.gamma - params.phi_b, (1.0 - t) * v, (1.0 - l) * r
    )
    return vault, direct
