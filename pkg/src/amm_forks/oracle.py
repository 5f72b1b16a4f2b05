"""Brute-force references for the closed forms in ``allocation`` and ``stackelberg``.

These deliberately avoid the analytic shortcuts: the trader oracle evaluates
the utility on a dense grid, the LP oracle hands out reserves one small slice at
a time to whichever AMM currently pays more, and discounted sums are added up
term by term.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .allocation import LpBlockInputs, TraderParams
from .core_model import ParameterError


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 1_000_000
    marginal_chunk: float = 1e-5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grid_points < 10:
            raise ParameterError("grid_points must be >= 10")
        if not 0.0 < self.marginal_chunk <= 1.0:
            raise ParameterError("marginal_chunk must lie in (0, 1]")


@functools.lru_cache(maxsize=4)
def _split_grid(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    inner = np.arange(1, n + 1) / (n + 1)
    deltas = np.concatenate(([0.0], inner, [1.0]))
    sq_a, sq_b = deltas**2, (1.0 - deltas) ** 2
    for arr in (deltas, sq_a, sq_b):
        arr.flags.writeable = False
    return deltas, sq_a, sq_b


def trader_utility_grid(p: TraderParams, cfg: OracleConfig) -> tuple[np.ndarray, np.ndarray]:
    """Candidate splits ``{0} U interior grid U {1}`` and their utilities."""
    deltas, sq_a, sq_b = _split_grid(cfg.grid_points)
    utils = sq_a / -p.reserves_a
    utils -= sq_b / p.reserves_b
    utils -= 2.0 * p.normalized_cost
    utils[0] += p.normalized_cost
    utils[-1] += p.normalized_cost
    return deltas, utils


def trader_argmax_grid(p: TraderParams, cfg: OracleConfig = OracleConfig()) -> float:
    """Best split on the grid; exact ties go to the smallest split."""
    deltas, utils = trader_utility_grid(p, cfg)
    return float(deltas[int(np.argmax(utils))])


def _marginal_yield(k: np.ndarray, r: np.ndarray) -> np.ndarray:
    out = np.where(k > 0.0, np.inf, 0.0)
    with np.errstate(over="ignore", under="ignore"):
        np.divide(k, r, out=out, where=r > 0.0)
    return out


def lp_equalization_batch(
    t_ratio: np.ndarray,
    gamma: np.ndarray,
    phi_a: np.ndarray,
    phi_b: np.ndarray,
    locked_a_floor: np.ndarray | float = 0.0,
    locked_b_floor: np.ndarray | float = 0.0,
    chunk: float = 1e-5,
) -> np.ndarray:
    """Greedy slice-by-slice reserve allocation, run for many instances at once.

    Every instance starts from its locked reserves and receives free reserves in
    slices of ``chunk`` (in units of total reserves). Each slice goes to the AMM
    whose marginal yield ``(1-gamma-phi) V / R`` is higher; ties go to AMM a.
    """
    t = np.asarray(t_ratio, dtype=float)
    k_a = (1.0 - np.asarray(gamma) - np.asarray(phi_a)) * t
    k_b = (1.0 - np.asarray(gamma) - np.asarray(phi_b)) * (1.0 - t)
    r_a = np.broadcast_to(np.asarray(locked_a_floor, dtype=float), t.shape).copy()
    r_b = np.broadcast_to(np.asarray(locked_b_floor, dtype=float), t.shape).copy()
    remaining = 1.0 - r_a - r_b
    while np.any(remaining > 0.0):
        dx = np.minimum(chunk, remaining)
        to_a = _marginal_yield(k_a, r_a) >= _marginal_yield(k_b, r_b)
        r_a += np.where(to_a, dx, 0.0)
        r_b += np.where(to_a, 0.0, dx)
        remaining -= dx
        remaining[remaining < chunk * 1e-9] = 0.0
    with np.errstate(under="ignore"):
        return r_a / (r_a + r_b)


def lp_equalization_sequential(
    inp: LpBlockInputs, cfg: OracleConfig = OracleConfig()
) -> float:
    """Scalar version of :func:`lp_equalization_batch` (same greedy rule)."""
    k_a = (1.0 - inp.gamma - inp.phi_a) * inp.t_ratio
    k_b = (1.0 - inp.gamma - inp.phi_b) * (1.0 - inp.t_ratio)
    r_a, r_b = inp.locked_a_floor, inp.locked_b_floor
    chunk = cfg.marginal_chunk
    remaining = 1.0 - r_a - r_b
    while remaining > chunk * 1e-9:
        dx = min(chunk, remaining)
        y_a = k_a / r_a if r_a > 0.0 else (math.inf if k_a > 0.0 else 0.0)
        y_b = k_b / r_b if r_b > 0.0 else (math.inf if k_b > 0.0 else 0.0)
        if y_a >= y_b:
            r_a += dx
        else:
            r_b += dx
        remaining -= dx
    return r_a / (r_a + r_b)


def discounted_sum_direct(payoffs: Sequence[float], eta: float) -> float:
    total = 0.0
    for i, x in enumerate(payoffs):
        total += x * eta**i
    return total
