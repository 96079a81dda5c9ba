import math
import warnings

import numpy as np
import pytest

from proserve.errors import DegenerateChain, StateSpaceTooLarge
from proserve.model import (
    ActionSetSpec,
    CostModel,
    DemandChain,
    ResourceModel,
    RewardModel,
    Scenario,
    entropy_rate,
    enumerate_joint_states,
    feasible_actions,
    max_weight_action,
    mean_unit_cost,
    mean_unit_costs,
    rho_max,
    sample_chain,
    steady_state,
    transition_prob,
)


def test_transition_prob_examples():
    chain = DemandChain(0.6, 0.2)
    assert transition_prob(chain, 1) == pytest.approx(0.8)
    assert transition_prob(chain, 0) == pytest.approx(0.6)
    assert transition_prob(DemandChain(0.0, 0.3), 0) == 0.0


def test_transition_prob_in_unit_interval():
    rng = np.random.default_rng(0)
    for _ in range(200):
        chain = DemandChain(rng.uniform(0, 1), rng.uniform(0, 1))
        for i in (0, 1):
            assert 0.0 <= transition_prob(chain, i) <= 1.0


def test_transition_prob_rejects_bad_state():
    with pytest.raises(ValueError):
        transition_prob(DemandChain(0.5, 0.5), 2)


def test_chain_validation():
    with pytest.raises(ValueError):
        DemandChain(1.2, 0.5)
    with pytest.raises(ValueError):
        DemandChain(0.5, -0.1)


def test_steady_state_examples():
    assert steady_state(DemandChain(0.6, 0.2)) == pytest.approx((0.25, 0.75))
    assert steady_state(DemandChain(0.5, 0.5)) == pytest.approx((0.5, 0.5))
    with pytest.raises(DegenerateChain):
        steady_state(DemandChain(0.0, 0.0))


def test_entropy_rate_examples():
    assert entropy_rate(DemandChain(0.5, 0.5)) == pytest.approx(1.0)
    assert entropy_rate(DemandChain(1.0, 1.0)) == 0.0
    assert entropy_rate(DemandChain(0.2, 0.2)) == pytest.approx(0.7219, abs=1e-4)
    with pytest.raises(DegenerateChain):
        entropy_rate(DemandChain(0.0, 0.0))


def test_enumerate_setting_a(setting_a):
    states = enumerate_joint_states(setting_a)
    assert len(states) == 64
    probs = np.array([s.prob for s in states])
    assert np.all(probs >= 0.0)
    assert abs(probs.sum() - 1.0) <= 1e-12


def test_enumerate_minimal():
    resources = ResourceModel(states=np.array([[1.0]]), probs=np.array([1.0]))
    scenario = Scenario(
        chains=(DemandChain(0.6, 0.2),),
        resources=resources,
        costs=CostModel.from_resource_values(resources),
        rewards=RewardModel(np.array([1.0]), np.array([0.0])),
        actions=ActionSetSpec.unconstrained(),
        rho=0.5,
    )
    states = enumerate_joint_states(scenario)
    assert len(states) == 2
    assert [s.prob for s in states] == pytest.approx([0.25, 0.75])


def test_enumerate_cap():
    m = 25
    resources = ResourceModel(states=np.ones((2, m)), probs=np.array([0.5, 0.5]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        scenario = Scenario(
            chains=tuple(DemandChain(0.5, 0.5) for _ in range(m)),
            resources=resources,
            costs=CostModel(np.ones((2, m))),
            rewards=RewardModel(np.ones(m), np.zeros(m)),
            actions=ActionSetSpec.unconstrained(),
            rho=1.0,
        )
    with pytest.raises(StateSpaceTooLarge):
        enumerate_joint_states(scenario)


def test_feasible_actions_examples():
    unconstrained = ActionSetSpec.unconstrained()
    assert len(feasible_actions(unconstrained, 0, 2)) == 4
    capped = ActionSetSpec.cardinality([1])
    acts = {tuple(a) for a in feasible_actions(capped, 0, 2)}
    assert acts == {(0, 0), (0, 1), (1, 0)}
    empty = ActionSetSpec.cardinality([0])
    assert [tuple(a) for a in feasible_actions(empty, 0, 3)] == [(0, 0, 0)]


def test_feasible_actions_down_closed():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = int(rng.integers(1, 5))
        cap = int(rng.integers(0, m + 1))
        acts = {tuple(a) for a in feasible_actions(ActionSetSpec.cardinality([cap]), 0, m)}
        for act in acts:
            for j in range(m):
                if act[j] == 1:
                    reduced = list(act)
                    reduced[j] = 0
                    assert tuple(reduced) in acts


def test_rho_max_setting_a(setting_a):
    assert rho_max(setting_a) == pytest.approx(4.9, abs=1e-12)
    assert rho_max(setting_a) == pytest.approx(
        sum(mean_unit_cost(setting_a, m) for m in range(3))
    )


def test_rho_max_degenerate_cases():
    resources = ResourceModel(states=np.array([[2.0]]), probs=np.array([1.0]))
    scenario = Scenario(
        chains=(DemandChain(0.5, 0.5),),
        resources=resources,
        costs=CostModel(np.array([[2.0]])),
        rewards=RewardModel(np.array([1.0]), np.array([0.0])),
        actions=ActionSetSpec.unconstrained(),
        rho=1.0,
    )
    assert rho_max(scenario) == pytest.approx(2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        zero = Scenario(
            chains=(DemandChain(0.5, 0.5),),
            resources=resources,
            costs=CostModel(np.array([[0.0]])),
            rewards=RewardModel(np.array([1.0]), np.array([0.0])),
            actions=ActionSetSpec.unconstrained(),
            rho=1.0,
        )
    assert rho_max(zero) == 0.0


def test_mean_unit_cost_setting_a(setting_a):
    assert mean_unit_cost(setting_a, 0) == pytest.approx(1.5)
    assert mean_unit_costs(setting_a) == pytest.approx([1.5, 1.7, 1.7])


def test_rho_warning():
    resources = ResourceModel(states=np.array([[1.0]]), probs=np.array([1.0]))
    with pytest.warns(UserWarning):
        Scenario(
            chains=(DemandChain(0.5, 0.5),),
            resources=resources,
            costs=CostModel.from_resource_values(resources),
            rewards=RewardModel(np.array([1.0]), np.array([0.0])),
            actions=ActionSetSpec.unconstrained(),
            rho=5.0,  # above rho_max = 1
        )


def test_product_form_matches_example(setting_a):
    res = setting_a.resources
    assert res.n_states == 8
    assert res.probs.sum() == pytest.approx(1.0)
    # P(per-app low-cost condition) = (0.5, 0.3, 0.3)
    low = res.states == 1.0
    marginals = [float(res.probs[low[:, m]].sum()) for m in range(3)]
    assert marginals == pytest.approx([0.5, 0.3, 0.3])


def test_sample_chain_occupancy_and_rates():
    # occupancy within 3 asymptotic standard errors, transition frequencies
    # within 4 binomial standard errors
    for eps, dlt, seed in ((0.6, 0.2, 3), (0.05, 0.05, 4)):
        chain = DemandChain(eps, dlt)
        n = 1_000_000
        x = sample_chain(chain, n, np.random.default_rng(seed))
        p_off, p_on = steady_state(chain)
        var_asym = p_off * p_on * (2.0 - eps - dlt) / (eps + dlt)
        se = math.sqrt(var_asym / n)
        assert abs(float(x.mean()) - p_on) <= 3 * se
        lead, succ = x[:-1], x[1:]
        n0 = int((lead == 0).sum())
        n01 = int(((lead == 0) & (succ == 1)).sum())
        se_eps = math.sqrt(eps * (1 - eps) / n0)
        assert abs(n01 / n0 - eps) <= 4 * se_eps


def test_sample_chain_exact_trigram_law():
    # the batched sojourn construction must reproduce the chain law exactly;
    # compare empirical trigram frequencies against closed-form probabilities
    # with a chi-square-style bound (~4 sigma per cell)
    chain = DemandChain(0.35, 0.6)
    p_off, p_on = steady_state(chain)
    start = {0: p_off, 1: p_on}
    step = {
        (0, 0): 1 - chain.epsilon,
        (0, 1): chain.epsilon,
        (1, 0): chain.delta,
        (1, 1): 1 - chain.delta,
    }
    n_draws = 120_000
    rng = np.random.default_rng(8)
    counts = {}
    for _ in range(n_draws):
        x = tuple(sample_chain(chain, 3, rng).tolist())
        counts[x] = counts.get(x, 0) + 1
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                p = start[a] * step[(a, b)] * step[(b, c)]
                observed = counts.get((a, b, c), 0) / n_draws
                tol = 4.0 * math.sqrt(p * (1 - p) / n_draws)
                assert abs(observed - p) <= tol, (a, b, c, observed, p)


def test_sample_chain_edge_cases():
    rng = np.random.default_rng(0)
    alternating = sample_chain(DemandChain(1.0, 1.0), 100, rng)
    assert np.all(alternating[:-1] != alternating[1:])
    absorbed = sample_chain(DemandChain(0.0, 0.3), 2000, rng, initial=1)
    first_zero = int(np.argmax(absorbed == 0))
    assert np.all(absorbed[first_zero:] == 0)
    assert sample_chain(DemandChain(0.5, 0.5), 0, rng).size == 0
    with pytest.raises(DegenerateChain):
        sample_chain(DemandChain(0.0, 0.0), 10, rng)


def test_max_weight_action_rules():
    w = np.array([2.0, 0.0, 0.0, -1.0])
    d = np.array([1.0, -0.5, 0.5, -2.0])
    assert max_weight_action(w, d, None).tolist() == [1, 1, 0, 0]
    assert max_weight_action(w, d, 1).tolist() == [1, 0, 0, 0]
    assert max_weight_action(w, d, 0).tolist() == [0, 0, 0, 0]
