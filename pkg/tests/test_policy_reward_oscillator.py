import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from atcpg.oscillator import (OMEGA_MAX, OMEGA_MIN, OscillatorState, advance, kuramoto_step,
                              phase_spread)
from atcpg.policy import (PolicyConfig, PolicyWeights, TickContext, apply_exploration,
                          effective_epsilon, predict_interval, update_weights,
                          update_weights_exact_reinforce)
from atcpg.reward import interval_aware_reward, naive_reward

CFG = PolicyConfig()
ZERO_W = PolicyWeights(0, 0, 0, 0, 0, 0, 0)
HEAVY = TickContext(fatigue=5.0)


def weights(**kw):
    return PolicyWeights(**{**ZERO_W.to_dict(), **kw})


# interval prediction

def test_worked_example_interval():
    assert predict_interval(weights(bias=60, w_fatigue=29.7), HEAVY, CFG) == pytest.approx(208.5, abs=1e-9)


def test_interval_clamps():
    assert predict_interval(weights(bias=5), TickContext(), CFG) == 10.0
    assert predict_interval(weights(bias=60, w_fatigue=100), HEAVY, CFG) == 300.0


@given(st.lists(st.floats(-100, 100), min_size=7, max_size=7),
       st.floats(0, 1), st.floats(0, 5), st.floats(-1, 1), st.floats(0, 1), st.floats(-1, 1),
       st.floats(0, 30))
def test_interval_always_in_bounds(w, p, f, dwb, rho, sp, k):
    s = TickContext(p, f, dwb, rho, sp, k)
    dt = predict_interval(PolicyWeights.from_array(np.array(w)), s, CFG)
    assert CFG.dt_min <= dt <= CFG.dt_max
    assert dt == predict_interval(PolicyWeights.from_array(np.array(w)), s, CFG)


def test_interval_non_increasing_in_kappa():
    w = PolicyWeights()
    dts = [predict_interval(w, TickContext(kappa=k, fatigue=1.0), CFG) for k in np.linspace(0, 3, 31)]
    assert all(b <= a for a, b in zip(dts, dts[1:]))
    assert dts[0] - dts[1] == pytest.approx(3.0)  # slope equals w_kappa in the unclamped range


# exploration

def test_effective_epsilon_values():
    assert effective_epsilon(TickContext(wellbeing_delta_prev=0.0), CFG) == 0.2
    assert effective_epsilon(TickContext(wellbeing_delta_prev=-1.0), CFG) == 0.0
    assert effective_epsilon(TickContext(wellbeing_delta_prev=0.5), CFG) == pytest.approx(0.1)


def test_exploration_off_leaves_interval():
    rng = np.random.default_rng(0)
    s = TickContext(wellbeing_delta_prev=1.0)
    assert all(apply_exploration(60.0, s, CFG, rng) == 60.0 for _ in range(500))


def test_exploration_bounds_and_reclamp():
    cfg = PolicyConfig(epsilon0=1.0)
    rng = np.random.default_rng(1)
    out = [apply_exploration(60.0, TickContext(), cfg, rng) for _ in range(2000)]
    assert min(out) >= 30.0 and max(out) <= 90.0
    assert np.std(out) > 10
    hi = [apply_exploration(250.0, TickContext(), cfg, rng) for _ in range(2000)]
    assert max(hi) == 300.0


def test_exploration_stream_alignment():
    a, b = np.random.default_rng(3), np.random.default_rng(3)
    apply_exploration(60.0, TickContext(wellbeing_delta_prev=1.0), CFG, a)
    apply_exploration(60.0, TickContext(), CFG, b)
    assert a.random() == b.random()


# weight updates

def test_worked_example_updates():
    w = weights(w_fatigue=30.0)
    assert update_weights(w, -0.6, HEAVY, CFG).w_fatigue == pytest.approx(29.7, abs=1e-9)
    assert update_weights(w, 0.440, HEAVY, CFG).w_fatigue == pytest.approx(30.22, abs=1e-9)


def test_zero_signal_keeps_weights():
    w = PolicyWeights()
    assert update_weights(w, 0.0, HEAVY, CFG) == w


def test_bias_uses_unit_feature():
    w = update_weights(PolicyWeights(), 1.0, TickContext(), CFG)
    assert w.bias == pytest.approx(60.1)


@given(st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=30))
def test_weights_stay_clipped(rs):
    w = PolicyWeights()
    s = TickContext(0.5, 5.0, -0.3, 0.7, 1.0, 10.0)
    for r in rs:
        w = update_weights(w, r, s, CFG)
    assert np.all(np.abs(w.as_array()) <= 100.0)


def test_credit_assignment_direction():
    w = weights(w_fatigue=30.0)
    assert update_weights(w, 2 * -0.3, HEAVY, CFG).w_fatigue < 30.0
    assert update_weights(w, 0.440, HEAVY, CFG).w_fatigue > 30.0


def test_exact_reinforce():
    w = PolicyWeights()
    assert update_weights_exact_reinforce(w, 1.0, HEAVY, 70.0, 70.0, 5.0, CFG) == w
    sigma = 3.0
    out = update_weights_exact_reinforce(w, 1.0, HEAVY, 60.0 + sigma**2, 60.0, sigma, CFG)
    assert out.w_fatigue == pytest.approx(w.w_fatigue + CFG.alpha * 5.0)
    assert out == update_weights(w, 1.0, HEAVY, CFG)
    with pytest.raises(ValueError):
        update_weights_exact_reinforce(w, 1.0, HEAVY, 60.0, 60.0, 0.0, CFG)


def test_policy_config_validation():
    with pytest.raises(ValueError):
        PolicyConfig(dt_min=300, dt_max=10)
    with pytest.raises(ValueError):
        PolicyConfig(epsilon0=1.5)


# rewards

def test_worked_example_reward():
    br = interval_aware_reward(-0.3, 0.0, 60.0, 60.0)
    assert br.efficiency_term == pytest.approx(-0.010, abs=1e-9)
    assert br.spacing_term == pytest.approx(0.450, abs=1e-9)
    assert br.total == pytest.approx(0.440, abs=1e-9)


def test_reward_vanishes_without_change():
    for dt in (10.0, 60.0, 300.0):
        assert interval_aware_reward(0.0, 0.0, dt, 60.0).total == 0.0


def test_reward_short_interval_with_spread():
    br = interval_aware_reward(0.1, 2.0, 10.0, 60.0)
    assert (br.efficiency_term, br.spacing_term, br.spread_term) == pytest.approx((0.02, 0.0, 0.2))
    assert br.total == pytest.approx(0.22)


def test_reward_rejects_bad_interval():
    with pytest.raises(ValueError):
        interval_aware_reward(0.1, 0.0, 0.0, 60.0)


@given(st.floats(-1, 1), st.floats(1, 300), st.floats(1, 300))
def test_spacing_bonus_shape(dwb, dt1, dt2):
    a = interval_aware_reward(dwb, 0.0, dt1, 60.0).spacing_term
    b = interval_aware_reward(dwb, 0.0, dt2, 60.0).spacing_term
    if dwb >= 0:
        assert a == 0.0 and b == 0.0
    elif dt1 < dt2:
        assert 0 < a < b


@given(st.floats(0.01, 10), st.floats(1, 299))
def test_spread_brake_decreasing(kappa, dt):
    assert (interval_aware_reward(0.0, kappa, dt, 60.0).spread_term
            > interval_aware_reward(0.0, kappa, dt + 1, 60.0).spread_term)


def test_naive_reward_values():
    assert naive_reward(-0.3, 1e9) == pytest.approx(-0.6, abs=1e-9)
    assert naive_reward(0.0, 0.5) == pytest.approx(1.0)
    assert naive_reward(0.1, 50.0) == pytest.approx(0.21)
    with pytest.raises(ValueError):
        naive_reward(0.1, 0.0)


def test_fatigue_weight_erodes_under_naive_reward():
    w_naive = w_aware = weights(bias=60.0, w_fatigue=30.0)
    history = [30.0]
    for _ in range(100):
        w_naive = update_weights(w_naive, 2 * -0.3, HEAVY, CFG)
        history.append(w_naive.w_fatigue)
        r = interval_aware_reward(-0.3, 0.0, predict_interval(w_aware, HEAVY, CFG), 60.0).total
        w_aware = update_weights(w_aware, r, HEAVY, CFG)
    assert all(b < a for a, b in zip(history, history[1:]))
    assert history[-1] <= 5.0
    assert w_aware.w_fatigue > 30.0


# oscillator

def test_advance_wraps_phase():
    s = advance(OscillatorState(6.2, 0.2), 0.0, 0.1)
    assert s.phase == pytest.approx(6.4 - 2 * math.pi)
    assert s.phase == pytest.approx(0.1168, abs=1e-4)
    assert s.omega == 0.2


def test_advance_omega_floor():
    assert advance(OscillatorState(0.0, 0.001), -10.0, 0.1).omega == OMEGA_MIN


@given(st.floats(-100, 100), st.floats(-1e3, 1e3), st.floats(-1, 1))
def test_advance_stays_in_range(phase, r, omega):
    s = advance(OscillatorState(phase, omega), r, 0.1)
    assert 0.0 <= s.phase < 2 * math.pi
    assert OMEGA_MIN <= s.omega <= OMEGA_MAX


def test_kuramoto_examples():
    np.testing.assert_allclose(kuramoto_step([0.0, 2.0], 0.5), [0.5, 1.5])
    np.testing.assert_array_equal(kuramoto_step([1.0, 1.0, 1.0], 0.3), [1.0, 1.0, 1.0])
    ph = np.array([0.1, 2.0, 5.0])
    np.testing.assert_array_equal(kuramoto_step(ph, 0.0), ph)
    with pytest.raises(ValueError):
        kuramoto_step(ph, 1.5)


def test_kuramoto_circular_mean_shortest_arc():
    out = kuramoto_step([0.1, 2 * math.pi - 0.1], 0.5, circular=True)
    assert phase_spread(np.unwrap(out)) < 0.2 + 1e-12


@given(st.lists(st.floats(0, 2 * math.pi - 1e-9), min_size=2, max_size=8), st.floats(0.01, 1.0))
def test_kuramoto_contracts_spread(phases, lam):
    before = phase_spread(phases)
    after = phase_spread(kuramoto_step(phases, lam))
    assert after <= (1 - lam) * before + 1e-9


def test_phase_spread_examples():
    assert phase_spread([1.3]) == 0.0
    assert phase_spread([0.5, 1.0, 3.0]) == pytest.approx(2.5)
