#!/usr/bin/env python3
"""Tabulate predicted vs simulated long-run volume share over a (phi_a, t0) grid.

Writes CSV to stdout:
    phi_a,t0,regime,predicted,simulated,blocks

Points where AMM a starts without the reserves majority are skipped. Rows
where ``predicted`` and ``simulated`` disagree mark fees at which the limit
state itself loses the reserves majority.
"""
import argparse
import sys

import numpy as np

from amm_forks.cli import fmt
from amm_forks.core_model import MarketParams, ParameterError
from amm_forks.dynamics import classify_regime, run_to_limit


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--gamma", type=float, default=0.003)
    ap.add_argument("--fees", type=int, default=25, help="number of phi_a grid points")
    ap.add_argument("--t0s", type=int, default=5, help="number of t0 grid points")
    ap.add_argument("--max-blocks", type=int, default=20_000)
    args = ap.parse_args(argv)

    top = min(0.9 * (1 - args.gamma), 3 * args.sigma * (1 - args.gamma))
    out = sys.stdout
    out.write("phi_a,t0,regime,predicted,simulated,blocks\n")
    for phi in np.linspace(0.0, top, args.fees):
        p = MarketParams(args.sigma, args.gamma, float(phi), 0.0)
        for t0 in np.linspace(0.55, 0.95, args.t0s):
            try:
                regime = classify_regime(p, float(t0))
            except ParameterError:
                continue  # AMM a does not lead on reserves at the start
            traj = run_to_limit(p, float(t0), max_blocks=args.max_blocks)
            out.write(",".join(fmt(v) for v in (
                float(phi), float(t0), regime.tag.value, regime.limit_value,
                traj.final.t_ratio, len(traj) - 1,
            )) + "\n")


if __name__ == "__main__":
    main()
