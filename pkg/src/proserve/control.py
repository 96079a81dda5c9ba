"""Per-slot pre-service decisions and the deficit queue.

The controller weighs, per application, the scaled expected reward gain of
pre-serving against the deficit-weighted cost differential, and picks the
feasible action of maximum total weight. A virtual *deficit queue* absorbs
effective cost above the budget rate; keeping it stable enforces the budget
in the long run. The learning-aided variant shifts the queue by a learned
offset so control starts near the final operating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import (
    DemandChain,
    Scenario,
    max_weight_action,
    mean_unit_costs,
    transition_prob,
)


class Phase(Enum):
    ESTIMATION = "estimation"
    CONTROL = "control"


@dataclass
class ControllerState:
    """Mutable state of one controller instance (single-owner, one per run).

    ``a_hat[i, m]`` is the next-slot ON probability the controller believes
    for application m in demand state i; plain control uses the true rates,
    the learning-aided variant its estimates. ``offset`` shifts the deficit
    into the effective queue and is zero for plain control.
    """

    V: float
    a_hat: np.ndarray
    deficit: float = 0.0
    offset: float = 0.0
    phase: Phase = Phase.CONTROL

    @property
    def effective_queue(self) -> float:
        return self.deficit + self.offset


@dataclass(frozen=True)
class Diagnostics:
    """Deterministic ceiling of the effective queue.

    ``d_min_hat`` is the smallest positive cost differential over all
    (application, resource state, demand bit) cells, ``+inf`` when none is
    positive. The effective queue can never exceed ``d_max_bound`` while the
    budget rate covers the controller's passive cost expectation.
    """

    d_min_hat: float
    d_max_bound: float


def effective_reward(
    i: int, mu: int, chain: DemandChain, r_pre: float, r_cur: float
) -> float:
    """Expected next-slot reward induced by this slot's pre-service bit."""
    a = transition_prob(chain, i)
    return a * r_pre if mu else a * r_cur


def effective_cost(
    i: int, mu: int, chain: DemandChain, unit_cost_now: float, mean_cost: float
) -> float:
    """Expected two-slot cost of the decision: the realized unit cost when
    pre-serving, otherwise the chance of demand times the mean unit cost."""
    if mu:
        return unit_cost_now
    return transition_prob(chain, i) * mean_cost


def cost_differential(unit_cost_now: float, a: float, mean_cost: float) -> float:
    """Expected cost saved by *not* pre-serving: ``C(1, S) - a * C_bar``."""
    return unit_cost_now - a * mean_cost


def decision_weights(
    state: ControllerState,
    demand: np.ndarray,
    resource_index: int,
    scenario: Scenario,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-application weights of pre-serving, and the cost differentials."""
    demand = np.asarray(demand, dtype=int)
    a = state.a_hat[demand, np.arange(scenario.n_apps)]
    unit = scenario.costs.unit_cost[resource_index]
    diffs = unit - a * mean_unit_costs(scenario)
    weights = state.V * a * scenario.rewards.r_diff - state.effective_queue * diffs
    return weights, diffs


def decide(
    state: ControllerState,
    demand: np.ndarray,
    resource_index: int,
    scenario: Scenario,
) -> np.ndarray:
    """Choose the pre-service vector maximizing the total decision weight.

    Implemented as weight-sort-and-take under cardinality caps and a direct
    threshold test otherwise. Zero-weight applications are pre-served only
    when their cost differential is nonpositive, which keeps the
    deterministic deficit ceiling intact.
    """
    if state.phase is not Phase.CONTROL:
        raise ValueError("decide() requires the controller to be in the control phase")
    weights, diffs = decision_weights(state, demand, resource_index, scenario)
    return max_weight_action(weights, diffs, scenario.actions.cap_for(resource_index))


def deficit_update(d: float, effective_cost_total: float, rho: float) -> float:
    """One queue step: accumulate effective cost above the budget rate,
    floored at zero."""
    return max(d + effective_cost_total - rho, 0.0)


def diagnostics(state: ControllerState, scenario: Scenario) -> Diagnostics:
    """Compute the smallest positive cost differential and the queue ceiling."""
    mean_cost = mean_unit_costs(scenario)
    diffs = (
        scenario.costs.unit_cost[:, None, :] - state.a_hat[None, :, :] * mean_cost
    )  # (K, 2, M)
    positive = diffs[diffs > 0.0]
    d_min = float(positive.min()) if positive.size else math.inf
    r_d = scenario.rewards.max_diff
    ceiling = (state.V * r_d / d_min if math.isfinite(d_min) else 0.0) + (
        scenario.n_apps * scenario.costs.c_max
    )
    return Diagnostics(d_min_hat=d_min, d_max_bound=ceiling)


def estimation_action(
    scenario: Scenario, resource_index: int, a_prior: float = 0.5
) -> np.ndarray:
    """Maximal feasible pre-service set used while statistics are estimated.

    All-ones when unconstrained; under a cap, applications are ranked by the
    prior expected reward gain ``a_prior * (r_pre - r_cur)``.
    """
    gains = a_prior * scenario.rewards.r_diff
    cap = scenario.actions.cap_for(resource_index)
    if cap is None:
        return np.ones(scenario.n_apps, dtype=np.int8)
    order = np.lexsort((np.arange(scenario.n_apps), -gains))
    mask = np.zeros(scenario.n_apps, dtype=np.int8)
    mask[order[:cap]] = 1
    return mask
