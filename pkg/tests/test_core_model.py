import pytest
from hypothesis import given
from hypothesis import strategies as st

from amm_forks.core_model import (
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


def test_typical_params_valid():
    p = MarketParams(sigma=0.2, gamma=0.003, phi_a=0.0006, phi_b=0.0)
    assert validate_params(p) is p


def test_zero_boundaries_valid():
    p = MarketParams(0.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    assert validate_params(p) == p


def test_fee_above_ceiling_rejected():
    with pytest.raises(ParameterError, match="phi_a: fee exceeds 1-gamma"):
        MarketParams(gamma=0.003, phi_a=0.9975)


@pytest.mark.parametrize(
    "kwargs, name",
    [
        ({"sigma": 1.2}, "sigma"),
        ({"gamma": 1.0}, "gamma"),
        ({"phi_b": -0.1}, "phi_b"),
        ({"phi_b": 0.997}, "phi_b"),
        ({"volume_per_block": 0.0}, "volume_per_block"),
        ({"reserves_total": -1.0}, "reserves_total"),
    ],
)
def test_violations_name_the_field(kwargs, name):
    with pytest.raises(ParameterError, match=name):
        MarketParams(**kwargs)


@given(
    st.floats(0, 1),
    st.floats(0, 0.5),
    st.floats(0, 0.49),
    st.floats(0, 0.49),
)
def test_validate_idempotent(sigma, gamma, phi_a, phi_b):
    p = MarketParams(sigma, gamma, phi_a, phi_b)
    assert validate_params(validate_params(p)) == p


@pytest.mark.parametrize(
    "l, expected", [(0.75, Leader.AmmA), (0.5, Leader.Tie), (0.24, Leader.AmmB)]
)
def test_leader_examples(l, expected):
    assert leader_from_reserves(l) is expected


def test_leader_rejects_out_of_range():
    with pytest.raises(ParameterError):
        leader_from_reserves(1.2)


@given(st.floats(0, 1))
def test_leader_antisymmetric(l):
    assert (leader_from_reserves(l) is Leader.AmmA) == (
        leader_from_reserves(1.0 - l) is Leader.AmmB
    )


def test_block_state_bounds():
    with pytest.raises(ParameterError, match="t_ratio"):
        BlockState(1.1, 0.5)


def test_trajectory_starts_at_initial():
    s0 = BlockState(0.6, 0.6)
    traj = Trajectory(s0)
    assert traj.states == (s0,)
    with pytest.raises(ParameterError):
        Trajectory(s0, (BlockState(0.7, 0.7),))


def test_regime_invariants():
    RegimeClass(Regime.InteriorLimit, 0.4)
    with pytest.raises(ParameterError):
        RegimeClass(Regime.DecayToZero, 0.1)
    with pytest.raises(ParameterError):
        RegimeClass(Regime.InteriorLimit, 1.0)
