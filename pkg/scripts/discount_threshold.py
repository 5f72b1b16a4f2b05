#!/usr/bin/env python3
"""Smallest discount factor at which governance prefers preventing the fork.

For each fee threshold, bisects on eta between a value where the fork wins
and one where prevention wins. Prints ``phi_threshold,eta_crossover``.
"""
import argparse

import numpy as np

from amm_forks.cli import fmt
from amm_forks.core_model import MarketParams
from amm_forks.stackelberg import GovernanceParams, GrimForkerState, governance_best_response


def forks(params, gf, eta, step):
    return governance_best_response(params, gf, GovernanceParams(eta=eta, fee_grid_step=step)).fork_happens


def crossover(params, gf, step, lo=0.01, hi=0.99999, iters=40):
    if not forks(params, gf, lo, step):
        return lo
    if forks(params, gf, hi, step):
        return float("nan")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if forks(params, gf, mid, step):
            lo = mid
        else:
            hi = mid
    return hi


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--gamma", type=float, default=0.003)
    ap.add_argument("--participation", type=float, default=0.6)
    ap.add_argument("--fee-grid-step", type=float, default=1e-3)
    ap.add_argument("--thresholds", default="0.0006,0.001,0.003,0.01,0.03")
    args = ap.parse_args(argv)

    params = MarketParams(args.sigma, args.gamma, 0.0, 0.0)
    print("phi_threshold,eta_crossover")
    for th in (float(x) for x in args.thresholds.split(",")):
        gf = GrimForkerState(th, args.participation)
        print(f"{fmt(th)},{fmt(crossover(params, gf, args.fee_grid_step))}")


if __name__ == "__main__":
    main()
