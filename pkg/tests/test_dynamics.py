import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from amm_forks.allocation import LpBlockInputs
from amm_forks.core_model import BlockState, MarketParams, ParameterError, Regime
from amm_forks.dynamics import (
    EquilibriumKind,
    SimulationConfig,
    classify_regime,
    consistent_state,
    equilibrium_fee,
    equilibrium_ratio,
    leader_fee_equilibrium,
    no_fee_closed_form,
    regime_thresholds,
    run_to_limit,
    simulate,
    step,
)
from amm_forks.oracle import OracleConfig, lp_equalization_sequential

NO_FEE = MarketParams(sigma=0.2, gamma=0.003, phi_a=0.0, phi_b=0.0)
TYPICAL = MarketParams()


def test_step_no_fee():
    s = step(BlockState(0.6, 0.6), NO_FEE)
    assert s.t_ratio == pytest.approx(0.68)
    assert s.l_ratio == pytest.approx(0.68)


def test_step_monopoly_absorbs():
    p = MarketParams(phi_a=0.9)
    assert step(BlockState(0.3, 1.0), p) == BlockState(1.0, 1.0)


def test_step_leader_fee_matches_oracle():
    s = step(BlockState(0.6, 0.6), TYPICAL)
    assert s.t_ratio == pytest.approx(0.68)
    assert s.l_ratio == pytest.approx(0.6798689935299501, abs=1e-12)
    greedy = lp_equalization_sequential(
        LpBlockInputs(s.t_ratio, 0.003, 0.0006, 0.0), OracleConfig(marginal_chunk=1e-5)
    )
    assert s.l_ratio == pytest.approx(greedy, abs=1e-4)


def test_simulate_three_blocks_no_fee():
    traj = simulate(SimulationConfig(NO_FEE, BlockState(0.6, 0.6), max_blocks=3))
    assert len(traj) == 4
    assert traj[3].l_ratio == pytest.approx(0.7952, abs=1e-12)
    assert traj[0] == traj.initial


def test_simulate_monopoly_constant():
    traj = simulate(SimulationConfig(TYPICAL, BlockState(1.0, 1.0), max_blocks=50))
    assert all(s == BlockState(1.0, 1.0) for s in traj.states)


def test_simulate_interior_limit():
    p = MarketParams(phi_a=0.3)
    traj = run_to_limit(p, 0.9)
    assert traj.final.t_ratio == pytest.approx(0.1994 / 0.3, abs=1e-6)


def test_simulation_config_validation():
    with pytest.raises(ParameterError):
        SimulationConfig(TYPICAL, BlockState(0.5, 0.5), max_blocks=0)
    with pytest.raises(ParameterError):
        SimulationConfig(TYPICAL, BlockState(0.5, 0.5), fixed_point_tol=0.0)


def test_no_fee_closed_form_examples():
    assert no_fee_closed_form(0.6, 0.2, 3) == pytest.approx(0.7952, abs=1e-12)
    assert no_fee_closed_form(1.0, 0.37, 17) == 1.0
    assert no_fee_closed_form(0.6, 0.0, 9) == pytest.approx(0.6)
    with pytest.raises(ParameterError):
        no_fee_closed_form(0.5, 0.2, 1)


@given(st.floats(0.5, 1.0, exclude_min=True), st.floats(0, 1))
def test_no_fee_simulation_tracks_closed_form(l0, sigma):
    p = MarketParams(sigma=sigma, gamma=0.003, phi_a=0.0, phi_b=0.0)
    traj = simulate(SimulationConfig(p, BlockState(l0, l0), max_blocks=60, fixed_point_tol=1e-300))
    prev = None
    for i, s in enumerate(traj.states):
        assert s.l_ratio == pytest.approx(no_fee_closed_form(l0, sigma, i), abs=1e-12)
        if i > 0:
            assert s.l_ratio == s.t_ratio
            if prev is not None and sigma > 0 and l0 < 1 and prev < 1 - 1e-15:
                assert s.l_ratio >= prev
        prev = s.l_ratio


def test_classify_examples():
    assert classify_regime(TYPICAL, 0.6).tag is Regime.GrowToLimit
    assert classify_regime(TYPICAL, 0.6).limit_value == 1.0
    assert classify_regime(MarketParams(phi_a=0.5), 0.9).tag is Regime.DecayToZero
    r = classify_regime(MarketParams(phi_a=0.3), 0.9)
    assert r.tag is Regime.InteriorLimit
    assert r.limit_value == pytest.approx(0.664667, abs=1e-6)


def test_classify_premises():
    with pytest.raises(ParameterError, match="phi_b"):
        classify_regime(MarketParams(phi_b=0.01), 0.9)
    with pytest.raises(ParameterError, match="t0"):
        classify_regime(TYPICAL, 0.5)


def test_classify_boundaries_take_closed_form():
    p = MarketParams(phi_a=2 * 0.2 * 0.997)
    r = classify_regime(p, 0.9)
    assert r.tag is Regime.InteriorLimit
    assert r.limit_value == pytest.approx(0.5)
    lower, _ = regime_thresholds(TYPICAL, 0.8)
    r = classify_regime(MarketParams(phi_a=lower), 0.8)
    assert r.limit_value == pytest.approx(0.8)


def test_equilibrium_fee_examples():
    assert equilibrium_fee(1.0, 0.2, 0.003) == pytest.approx(0.1994)
    assert equilibrium_fee(0.6647, 0.2, 0.003) == pytest.approx(0.3, abs=1e-4)
    assert equilibrium_fee(1.0, 0.0, 0.5) == 0.0
    with pytest.raises(ParameterError):
        equilibrium_fee(0.0, 0.2, 0.003)


def test_equilibrium_ratio_examples():
    assert equilibrium_ratio(0.0006, 0.2, 0.003) == 1.0
    assert equilibrium_ratio(0.3, 0.2, 0.003) == pytest.approx(0.664667, abs=1e-6)
    assert equilibrium_ratio(0.1994, 0.2, 0.003) == 1.0
    assert equilibrium_ratio(0.0, 0.2, 0.003) == 1.0


@given(st.floats(0.01, 1.0), st.floats(0.0, 0.05), st.floats(0.01, 1.0))
def test_equilibrium_fee_ratio_inverse(sigma, gamma, t):
    assume(sigma * (1 - gamma) < t < 1.0)
    phi = equilibrium_fee(t, sigma, gamma)
    assert equilibrium_ratio(phi, sigma, gamma) == pytest.approx(t, rel=1e-12)


def test_leader_fee_equilibrium_report():
    rep = leader_fee_equilibrium(TYPICAL)
    assert rep.kind is EquilibriumKind.Monopoly and rep.t_star == 1.0
    rep = leader_fee_equilibrium(MarketParams(phi_a=0.3))
    assert rep.kind is EquilibriumKind.InteriorFee
    assert rep.phi_star * rep.t_star == pytest.approx(0.2 * 0.997)


@given(
    st.floats(0, 1), st.floats(0, 0.05), st.floats(0, 0.45), st.floats(0, 0.45),
    st.floats(0, 1), st.floats(0, 1),
)
def test_states_stay_in_unit_square(sigma, gamma, fa, fb, t0, l0):
    p = MarketParams(sigma, gamma, fa, fb)
    traj = simulate(SimulationConfig(p, BlockState(t0, l0), max_blocks=200))
    for s in traj.states:
        assert 0.0 <= s.t_ratio <= 1.0 and 0.0 <= s.l_ratio <= 1.0


@given(st.floats(0, 0.99))
def test_absorption_for_any_fee(frac):
    p = MarketParams(phi_a=frac * 0.997)
    assert step(BlockState(1.0, 1.0), p) == BlockState(1.0, 1.0)


def _interior_stays_led(sigma, gamma, phi):
    # reserves leadership holds at the interior limit only below 2 s(1-g)/(1+s)
    return phi < 2 * sigma * (1 - gamma) / (1 + sigma)


@given(st.floats(0.05, 0.5), st.floats(0.0, 0.01), st.floats(0.55, 0.999), st.floats(0.0, 1.0))
def test_regime_matches_long_simulation(sigma, gamma, t0, u):
    s = sigma * (1 - gamma)
    phi = u * min(0.9 * (1 - gamma), 3 * s)
    assume(phi > 0)
    p = MarketParams(sigma, gamma, phi, 0.0)
    init = consistent_state(t0, p)
    assume(init.l_ratio > 0.5)
    regime = classify_regime(p, t0)
    if regime.tag is Regime.InteriorLimit:
        assume(_interior_stays_led(sigma, gamma, phi))
    lower, upper = regime_thresholds(p, t0)
    assume(min(abs(phi - lower), abs(phi - upper)) > 1e-3)
    # at phi == sigma(1-gamma) the approach to 1 is algebraic, not geometric
    assume(abs(phi - s) > 1e-2)
    traj = simulate(SimulationConfig(p, init, max_blocks=10_000))
    t = traj.t
    if regime.tag is Regime.GrowToLimit:
        assert all(b >= a - 1e-15 for a, b in zip(t, t[1:]))
    else:
        assert all(b <= a + 1e-15 for a, b in zip(t, t[1:]))
    assert traj.final.t_ratio == pytest.approx(regime.limit_value, abs=1e-4)


def test_classify_requires_reserves_leadership():
    p = MarketParams(phi_a=0.239)
    with pytest.raises(ParameterError, match="market leader"):
        classify_regime(p, 0.55)
    with pytest.raises(ParameterError, match="market leader"):
        classify_regime(TYPICAL, 0.9, l0=0.4)
    assert classify_regime(TYPICAL, 0.9, l0=0.6).tag is Regime.GrowToLimit
