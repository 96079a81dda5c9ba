import math
import warnings

import numpy as np
import pytest

from proserve.control import (
    ControllerState,
    Phase,
    cost_differential,
    decide,
    decision_weights,
    deficit_update,
    diagnostics,
    effective_cost,
    effective_reward,
    estimation_action,
)
from proserve.model import (
    ActionSetSpec,
    CostModel,
    DemandChain,
    ResourceModel,
    RewardModel,
    Scenario,
    a_table,
    feasible_actions,
)


def _scenario(eps, dlt, unit_rows, probs, r_pre, r_cur, rho, caps=None):
    resources = ResourceModel(states=np.asarray(unit_rows, float), probs=np.asarray(probs, float))
    actions = ActionSetSpec.unconstrained() if caps is None else ActionSetSpec.cardinality(caps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Scenario(
            chains=tuple(DemandChain(e, d) for e, d in zip(eps, dlt)),
            resources=resources,
            costs=CostModel.from_resource_values(resources),
            rewards=RewardModel(np.asarray(r_pre, float), np.asarray(r_cur, float)),
            actions=actions,
            rho=rho,
        )


def test_effective_reward_examples():
    chain = DemandChain(0.6, 0.2)
    assert effective_reward(1, 1, chain, 3.0, 1.0) == pytest.approx(2.4)
    assert effective_reward(0, 0, DemandChain(0.0, 0.3), 3.0, 1.0) == 0.0
    coin = DemandChain(0.5, 0.5)
    assert effective_reward(0, 1, coin, 1.0, 1.0) == pytest.approx(0.5)
    assert effective_reward(0, 0, coin, 1.0, 1.0) == pytest.approx(0.5)


def test_effective_cost_examples():
    chain = DemandChain(0.6, 0.2)
    assert effective_cost(1, 1, chain, 2.0, 1.5) == 2.0
    assert effective_cost(1, 0, chain, 2.0, 1.5) == pytest.approx(1.2)
    assert effective_cost(0, 0, DemandChain(0.0, 0.3), 2.0, 1.5) == 0.0


def test_cost_differential_examples():
    assert cost_differential(2.0, 0.8, 1.5) == pytest.approx(0.8)
    assert cost_differential(1.0, 0.8, 1.5) == pytest.approx(-0.2)
    assert cost_differential(2.0, 0.0, 1.5) == 2.0


def test_decide_single_app_example():
    # V=10, a=0.8, r_pre - r_cur = 2, dtilde=2, C(1,S)=2, C_bar=1.5:
    # weight = 16 - 2*0.8 = 14.4 > 0, so pre-serve
    scenario = _scenario([0.6], [0.2], [[1.0], [2.0]], [0.5, 0.5], [3.0], [1.0], 1.2)
    state = ControllerState(V=10.0, a_hat=a_table(scenario.epsilon, scenario.delta), deficit=2.0)
    weights, _ = decision_weights(state, [1], 1, scenario)
    assert weights[0] == pytest.approx(14.4)
    assert decide(state, [1], 1, scenario).tolist() == [1]


def test_decide_zero_action_above_ceiling():
    # uniform unit cost 3 = mean cost: every differential 3(1-a) > 0; above
    # the ceiling V*r_d/D_min every weight is negative
    scenario = _scenario([0.6], [0.2], [[3.0]], [1.0], [3.0], [1.0], 2.0)
    state = ControllerState(V=10.0, a_hat=a_table(scenario.epsilon, scenario.delta), deficit=40.0)
    diag = diagnostics(state, scenario)
    assert state.effective_queue >= 10.0 * 2.0 / diag.d_min_hat
    assert decide(state, [1], 0, scenario).tolist() == [0]


def test_decide_requires_control_phase(setting_a):
    state = ControllerState(
        V=10.0,
        a_hat=a_table(setting_a.epsilon, setting_a.delta),
        phase=Phase.ESTIMATION,
    )
    with pytest.raises(ValueError):
        decide(state, [0, 0, 0], 0, setting_a)


def test_decide_matches_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(200):
        m = int(rng.integers(1, 11))
        k = int(rng.integers(1, 3))
        unit = rng.uniform(0.0, 3.0, (k, m))
        probs = rng.uniform(0.1, 1.0, k)
        probs /= probs.sum()
        r_cur = rng.uniform(0.0, 2.0, m)
        caps = rng.integers(0, m + 1, k) if rng.random() < 0.5 else None
        scenario = _scenario(
            rng.uniform(0.0, 1.0, m),
            rng.uniform(0.0, 1.0, m),
            unit,
            probs,
            r_cur + rng.uniform(0.0, 3.0, m),
            r_cur,
            rho=2.0,
            caps=caps,
        )
        state = ControllerState(
            V=float(rng.uniform(1.0, 50.0)),
            a_hat=a_table(scenario.epsilon, scenario.delta),
            deficit=float(rng.uniform(0.0, 30.0)),
        )
        demand = rng.integers(0, 2, m)
        ki = int(rng.integers(0, k))
        weights, _ = decision_weights(state, demand, ki, scenario)
        chosen = decide(state, demand, ki, scenario)
        best = max(
            float((np.asarray(mu) * weights).sum())
            for mu in feasible_actions(scenario.actions, ki, m)
        )
        assert float((chosen * weights).sum()) == pytest.approx(best, abs=1e-9)


def test_decide_scale_invariance():
    rng = np.random.default_rng(22)
    for _ in range(50):
        m = int(rng.integers(1, 6))
        unit = rng.uniform(0.1, 3.0, (2, m))
        probs = np.array([0.4, 0.6])
        r_cur = rng.uniform(0.0, 2.0, m)
        scenario = _scenario(
            rng.uniform(0.05, 0.95, m),
            rng.uniform(0.05, 0.95, m),
            unit,
            probs,
            r_cur + rng.uniform(0.1, 3.0, m),
            r_cur,
            rho=2.0,
        )
        a_hat = a_table(scenario.epsilon, scenario.delta)
        v = float(rng.uniform(1.0, 20.0))
        d = float(rng.uniform(0.0, 20.0))
        c = float(rng.uniform(1.5, 9.0))
        demand = rng.integers(0, 2, m)
        one = decide(ControllerState(V=v, a_hat=a_hat, deficit=d), demand, 0, scenario)
        scaled = decide(
            ControllerState(V=c * v, a_hat=a_hat, deficit=c * d), demand, 0, scenario
        )
        assert one.tolist() == scaled.tolist()


def test_deficit_update_examples():
    assert deficit_update(0.0, 3.5, 3.5) == 0.0
    assert deficit_update(5.0, 2.0, 3.5) == pytest.approx(3.5)
    assert deficit_update(0.0, 0.0, 3.5) == 0.0


def test_deficit_update_lipschitz_and_monotone():
    rng = np.random.default_rng(23)
    for _ in range(200):
        d1, d2 = rng.uniform(0.0, 10.0, 2)
        c1, c2 = rng.uniform(0.0, 6.0, 2)
        rho = float(rng.uniform(0.1, 5.0))
        assert abs(deficit_update(d1, c1, rho) - deficit_update(d2, c1, rho)) <= abs(
            d1 - d2
        ) + 1e-12
        lo, hi = sorted((c1, c2))
        assert deficit_update(d1, lo, rho) <= deficit_update(d1, hi, rho) + 1e-12


def test_diagnostics_setting_a(setting_a):
    state = ControllerState(V=100.0, a_hat=a_table(setting_a.epsilon, setting_a.delta))
    diag = diagnostics(state, setting_a)
    # smallest positive differential: app 1 OFF in the cheap condition,
    # 1 - 0.6 * 1.5 = 0.1
    assert diag.d_min_hat == pytest.approx(0.1)
    assert diag.d_max_bound == pytest.approx(100.0 * 7.0 / 0.1 + 3 * 2.0)


def test_diagnostics_no_positive_differential():
    # always-ON chains make every differential C - C_bar <= 0 for K=1
    scenario = _scenario([1.0], [0.0], [[2.0]], [1.0], [3.0], [1.0], 2.0)
    state = ControllerState(V=50.0, a_hat=a_table(scenario.epsilon, scenario.delta))
    diag = diagnostics(state, scenario)
    assert math.isinf(diag.d_min_hat)
    assert diag.d_max_bound == pytest.approx(1 * 2.0)


def test_diagnostics_zero_reward_gap():
    scenario = _scenario([0.6], [0.2], [[1.0], [2.0]], [0.5, 0.5], [1.0], [1.0], 1.2)
    state = ControllerState(V=50.0, a_hat=a_table(scenario.epsilon, scenario.delta))
    diag = diagnostics(state, scenario)
    assert math.isfinite(diag.d_min_hat)
    assert diag.d_max_bound == pytest.approx(1 * 2.0)


def test_estimation_action_respects_caps():
    scenario = _scenario(
        [0.5, 0.5, 0.5],
        [0.5, 0.5, 0.5],
        [[1.0, 1.0, 1.0]],
        [1.0],
        [3.0, 8.0, 5.0],
        [1.0, 1.0, 1.0],
        2.0,
        caps=[2],
    )
    action = estimation_action(scenario, 0)
    # ranked by reward gain: applications 1 and 2 (gains 7 and 4)
    assert action.tolist() == [0, 1, 1]
    unconstrained = _scenario(
        [0.5], [0.5], [[1.0]], [1.0], [2.0], [1.0], 0.8
    )
    assert estimation_action(unconstrained, 0).tolist() == [1]
