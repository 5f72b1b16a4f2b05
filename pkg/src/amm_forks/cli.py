"""Command-line front end.

Configuration is a flat text file with one ``key = value`` per line and ``#``
comments. Sweeps are declared as ``sweep.<key> = start:stop:steps`` (evenly
spaced, endpoints included) or ``sweep.<key> = v1, v2, ...``.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import itertools
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, TextIO

import numpy as np

from . import dynamics, oracle, stackelberg
from .allocation import LpBlockInputs, TraderParams, corner_cost_threshold, lps_block_rule
from .core_model import BlockState, MarketParams, ParameterError, leader_from_reserves

log = logging.getLogger("amm_forks")

SIG_DIGITS = 12

_FLOAT_KEYS = (
    "sigma", "gamma", "phi_a", "phi_b", "volume_per_block", "reserves_total",
    "t0", "eta", "phi_threshold", "participation", "fixed_point_tol",
    "fee_grid_step", "horizon_tol", "marginal_chunk",
)
_INT_KEYS = ("max_blocks", "grid_points", "seed")
_OPTIONAL_KEYS = ("l0", "phi_gov", "lock_blocks")
_SENTINELS = {"l0": "auto", "phi_gov": "none", "lock_blocks": "unbounded"}


@dataclass(frozen=True)
class ScenarioConfig:
    sigma: float = 0.2
    gamma: float = 0.003
    phi_a: float = 0.0006
    phi_b: float = 0.0
    volume_per_block: float = 1.0
    reserves_total: float = 1.0
    t0: float = 0.6
    l0: Optional[float] = None  # None: LPs start in equilibrium with t0
    eta: float = 0.99
    phi_threshold: float = 0.0006
    participation: float = 0.6
    lock_blocks: Optional[int] = None  # None: unbounded
    phi_gov: Optional[float] = None  # set: simulate the Grim Forker world
    max_blocks: int = dynamics.DEFAULT_MAX_BLOCKS
    fixed_point_tol: float = dynamics.DEFAULT_FIXED_POINT_TOL
    fee_grid_step: float = 1e-4
    horizon_tol: float = 1e-9
    grid_points: int = 1_000_000
    marginal_chunk: float = 1e-5
    seed: int = 0
    sweep: tuple[tuple[str, tuple[float, ...]], ...] = field(default=())

    def __post_init__(self) -> None:
        self.market()
        for name in ("t0", "l0"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name}: must lie in [0, 1], got {v!r}")
        self.governance()
        self.grim_forker()
        if self.phi_gov is not None:
            dataclasses.replace(self.market(), phi_a=self.phi_gov)
        if self.max_blocks < 1:
            raise ParameterError("max_blocks must be >= 1")
        oracle.OracleConfig(self.grid_points, self.marginal_chunk, self.seed)

    def market(self) -> MarketParams:
        return MarketParams(
            self.sigma, self.gamma, self.phi_a, self.phi_b,
            self.volume_per_block, self.reserves_total,
        )

    def governance(self) -> stackelberg.GovernanceParams:
        return stackelberg.GovernanceParams(self.eta, self.fee_grid_step, self.horizon_tol)

    def grim_forker(self) -> stackelberg.GrimForkerState:
        return stackelberg.GrimForkerState(
            self.phi_threshold, self.participation, self.lock_blocks
        )

    def initial_state(self) -> BlockState:
        if self.l0 is None:
            return dynamics.consistent_state(self.t0, self.market())
        return BlockState(self.t0, self.l0)

    def oracle_config(self) -> oracle.OracleConfig:
        return oracle.OracleConfig(self.grid_points, self.marginal_chunk, self.seed)


def _parse_scalar(key: str, raw: str) -> Any:
    if key in _OPTIONAL_KEYS and raw.lower() == _SENTINELS[key]:
        return None
    try:
        if key in _INT_KEYS or key == "lock_blocks":
            return int(raw)
        return float(raw)
    except ValueError:
        raise ParameterError(f"{key}: cannot parse value {raw!r}") from None


def _parse_sweep(key: str, raw: str) -> tuple[float, ...]:
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ParameterError(f"sweep.{key}: expected start:stop:steps")
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
        if steps < 1:
            raise ParameterError(f"sweep.{key}: steps must be >= 1")
        if steps == 1:
            return (start,)
        return tuple(float(x) for x in np.linspace(start, stop, steps))
    values = tuple(_parse_scalar(key, v.strip()) for v in raw.split(",") if v.strip())
    if not values:
        raise ParameterError(f"sweep.{key}: no values")
    return values


def parse_config(text: str) -> ScenarioConfig:
    known = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"sweep"}
    values: dict[str, Any] = {}
    sweep: list[tuple[str, tuple[float, ...]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in known:
                raise ParameterError(f"unknown key: {key}")
            sweep.append((name, _parse_sweep(name, raw)))
        elif key in known:
            values[key] = _parse_scalar(key, raw)
        else:
            raise ParameterError(f"unknown key: {key}")
    return ScenarioConfig(**values, sweep=tuple(sweep))


def load_config(path: str | Path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def fmt(x: Any) -> str:
    """Render floats at 12 significant digits, booleans as true/false."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        s = f"{float(x):.{SIG_DIGITS}g}"
        if s.lstrip("-").isdigit():
            s += ".0"
        return s
    return str(x)


def _row(values: Iterable[Any]) -> str:
    return ",".join(fmt(v) for v in values) + "\n"


SIMULATE_HEADER = "block,T,L,phi_a,leader,forked,block_payoff,discounted_cum_payoff\n"


def run_simulate(cfg: ScenarioConfig, out: TextIO) -> int:
    params, v, eta = cfg.market(), cfg.volume_per_block, cfg.eta
    out.write(SIMULATE_HEADER)
    cum, weight = 0.0, 1.0
    if cfg.phi_gov is None:
        traj = dynamics.simulate(
            dynamics.SimulationConfig(
                params, cfg.initial_state(), cfg.max_blocks, cfg.fixed_point_tol
            )
        )
        for i, s in enumerate(traj.states):
            pay = stackelberg.governance_block_payoff(params.phi_a, s.t_ratio * v)
            cum += pay * weight
            weight *= eta
            out.write(_row((i, s.t_ratio, s.l_ratio, params.phi_a,
                            leader_from_reserves(s.l_ratio).value, False, pay, cum)))
        return 0
    gf, state, phi = cfg.grim_forker(), stackelberg.MONOPOLY, cfg.phi_gov
    for i in range(cfg.max_blocks):
        nxt, gf = stackelberg.fork_block_step(state, params, gf, phi, i)
        pay = stackelberg.governance_block_payoff(phi, nxt.t_ratio * v)
        cum += pay * weight
        weight *= eta
        out.write(_row((i, nxt.t_ratio, nxt.l_ratio, phi,
                        leader_from_reserves(nxt.l_ratio).value, gf.forked, pay, cum)))
        settled = not gf.lock_active(i + 1) or gf.lock_blocks is None
        if (
            settled
            and abs(nxt.t_ratio - state.t_ratio) < cfg.fixed_point_tol
            and abs(nxt.l_ratio - state.l_ratio) < cfg.fixed_point_tol
        ):
            break
        state = nxt
    return 0


def run_classify(cfg: ScenarioConfig, out: TextIO) -> int:
    params = cfg.market()
    regime = dynamics.classify_regime(params, cfg.t0, cfg.l0)
    lower, upper = dynamics.regime_thresholds(params, cfg.t0)
    out.write(f"{regime.tag.value} {fmt(regime.limit_value)}\n")
    out.write(f"lower_threshold {fmt(lower)}\n")
    out.write(f"upper_threshold {fmt(upper)}\n")
    return 0


def run_equilibrium(cfg: ScenarioConfig, out: TextIO) -> int:
    params = cfg.market()
    rep = dynamics.leader_fee_equilibrium(params)
    out.write(f"{rep.kind.value} {fmt(rep.t_star)}\n")
    out.write(f"phi_star {fmt(rep.phi_star)}\n")
    if cfg.t0 > 0.0:
        fee = dynamics.equilibrium_fee(cfg.t0, params.sigma, params.gamma)
        out.write(f"fee_holding_t0 {fmt(fee)}\n")
        out.write(f"fee_holding_t0_achievable {fmt(fee < params.fee_ceiling)}\n")
    return 0


def _stackelberg_lines(o: stackelberg.StackelbergOutcome) -> list[str]:
    status = "threat inactive" if not o.threat_active else (
        "fork" if o.fork_happens else "prevent"
    )
    return [
        f"best_fee {fmt(o.best_fee)}",
        f"fork_happens {fmt(o.fork_happens)}",
        f"prevent_payoff {fmt(o.prevent_payoff)}",
        f"fork_payoff {fmt(o.fork_payoff)}",
        f"fork_best_fee {fmt(o.fork_best_fee)}",
        f"status {status}",
    ]


def run_stackelberg(cfg: ScenarioConfig, out: TextIO) -> int:
    outcome = stackelberg.governance_best_response(
        cfg.market(), cfg.grim_forker(), cfg.governance()
    )
    out.write("\n".join(_stackelberg_lines(outcome)) + "\n")
    return 0


SWEEP_RESULT_COLUMNS = (
    "regime", "limit", "best_fee", "fork_happens", "threat_active",
    "prevent_payoff", "fork_payoff",
)


def sweep_point(cfg: ScenarioConfig) -> tuple[Any, ...]:
    """Regime and Stackelberg decision for one fully specified scenario."""
    try:
        regime = dynamics.classify_regime(cfg.market(), cfg.t0, cfg.l0)
        tag, limit = regime.tag.value, regime.limit_value
    except ParameterError:
        tag, limit = "NA", math.nan
    o = stackelberg.governance_best_response(
        cfg.market(), cfg.grim_forker(), cfg.governance()
    )
    return (tag, limit, o.best_fee, o.fork_happens, o.threat_active,
            o.prevent_payoff, o.fork_payoff)


def _sweep_task(args: tuple[int, ScenarioConfig]) -> tuple[int, tuple[Any, ...]]:
    i, cfg = args
    return i, sweep_point(cfg)


def sweep_points(cfg: ScenarioConfig) -> list[tuple[tuple[float, ...], ScenarioConfig]]:
    names = [name for name, _ in cfg.sweep]
    points = []
    for combo in itertools.product(*(vals for _, vals in cfg.sweep)):
        overrides = dict(zip(names, combo))
        points.append((combo, dataclasses.replace(cfg, sweep=(), **overrides)))
    return points


def run_sweep(cfg: ScenarioConfig, out: TextIO, workers: int = 1) -> int:
    if not cfg.sweep:
        log.error("sweep requires at least one sweep.<key> entry")
        return 2
    points = sweep_points(cfg)
    if not points:
        log.error("sweep grid is empty")
        return 2
    tasks = [(i, p) for i, (_, p) in enumerate(points)]
    if workers <= 1:
        results = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    results.sort(key=lambda r: r[0])
    out.write(",".join([name for name, _ in cfg.sweep] + list(SWEEP_RESULT_COLUMNS)) + "\n")
    for (combo, _), (_, res) in zip(points, results):
        out.write(_row(combo + res))
    return 0


def run_oracle_check(cfg: ScenarioConfig, out: TextIO, instances: int = 200) -> int:
    """Compare the closed forms against the brute-force oracles on seeded instances."""
    rng = np.random.default_rng(cfg.seed)
    ocfg = cfg.oracle_config()
    t = rng.uniform(0.0, 1.0, instances)
    g = rng.uniform(0.0, 0.01, instances)
    fa = rng.uniform(0.0, 0.5, instances)
    fb = rng.uniform(0.0, 0.5, instances)
    closed = np.array([lps_block_rule(LpBlockInputs(*x)) for x in zip(t, g, fa, fb)])
    greedy = oracle.lp_equalization_batch(t, g, fa, fb, chunk=ocfg.marginal_chunk)
    lp_err = float(np.abs(closed - greedy).max())
    lp_tol = max(1e-6, 10 * ocfg.marginal_chunk)

    mismatches = 0
    cell = 1.0 / (ocfg.grid_points + 1)
    for _ in range(instances):
        rb = rng.uniform(0.1, 1.0)
        ra = rb * rng.uniform(1.0, 5.0)
        c_star = corner_cost_threshold(TraderParams(ra, rb))
        c = c_star * rng.uniform(0.0, 2.0)
        p = TraderParams(ra, rb, c)
        corner = oracle.trader_argmax_grid(p, ocfg) == 1.0
        if corner != (c > c_star) and abs(c - c_star) > grid_cost_resolution(p, cell):
            mismatches += 1

    lp_ok = lp_err <= lp_tol
    out.write(f"lp_rule_max_abs_error {fmt(lp_err)} tol {fmt(lp_tol)} {'PASS' if lp_ok else 'FAIL'}\n")
    out.write(f"trader_corner_mismatches {mismatches} {'PASS' if mismatches == 0 else 'FAIL'}\n")
    return 0 if lp_ok and mismatches == 0 else 1


def grid_cost_resolution(p: TraderParams, cell: float) -> float:
    """Cost band around the corner threshold that one grid cell cannot resolve.

    The interior optimum is off-grid by at most one cell, which lowers the best
    grid utility by at most ``(1/R_a + 1/R_b) cell^2``.
    """
    return (1.0 / p.reserves_a + 1.0 / p.reserves_b) * cell**2


COMMANDS = ("simulate", "classify", "equilibrium", "stackelberg", "sweep", "oracle-check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amm-forks",
        description="Competing AMM forks: block dynamics, regimes and Grim Forker analysis.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key = value scenario file")
    parser.add_argument("--out", default="stdout", help="output path or 'stdout'")
    parser.add_argument("--blocks", type=int, help="override max_blocks")
    parser.add_argument("--workers", type=int, default=1, help="sweep worker processes")
    parser.add_argument("--instances", type=int, default=200, help="oracle-check instance count")
    parser.add_argument("--quiet", action="store_true", help="suppress diagnostics")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        if args.blocks is not None:
            cfg = dataclasses.replace(cfg, max_blocks=args.blocks)
    except (OSError, ParameterError) as exc:
        log.error("%s", exc)
        return 2

    buf = io.StringIO()
    try:
        if args.command == "simulate":
            status = run_simulate(cfg, buf)
        elif args.command == "classify":
            status = run_classify(cfg, buf)
        elif args.command == "equilibrium":
            status = run_equilibrium(cfg, buf)
        elif args.command == "stackelberg":
            status = run_stackelberg(cfg, buf)
        elif args.command == "sweep":
            status = run_sweep(cfg, buf, args.workers)
        else:
            status = run_oracle_check(cfg, buf, args.instances)
    except ParameterError as exc:
        log.error("%s", exc)
        return 2

    try:
        if args.out in ("stdout", "-"):
            sys.stdout.write(buf.getvalue())
        else:
            Path(args.out).write_text(buf.getvalue())
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return 1
    log.info("%s done", args.command)
    return status


if __name__ == "__main__":
    sys.exit(main())
