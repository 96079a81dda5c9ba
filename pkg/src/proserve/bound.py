"""Exact intelligence bound and Lagrangian dual machinery.

The *intelligence* of a scenario is the maximum long-run average reward any
feasible policy can earn while keeping average cost within the budget rate.
It equals the optimal value of a linear program over per-joint-state action
distributions with a single coupling (budget) constraint. That structure is
exploited twice:

* the dual of the program is a piecewise-linear convex function of a scalar
  multiplier ``gamma``, minimized here by subgradient bisection;
* the program itself is solved exactly by probing the segments between the
  dual's breakpoints and, at the budget-crossing breakpoint, mixing the two
  bracketing per-state action choices in at most one state so the budget is
  met with equality.

Everything here is a pure function of immutable inputs and safe to run in
parallel across budgets or scale parameters.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InfeasibleBudget, StateSpaceTooLarge
from .model import (
    DEFAULT_STATE_CAP,
    Scenario,
    a_table,
    mean_unit_costs,
    stationary_on,
)


@dataclass(frozen=True, eq=False)
class DualParams:
    """Inputs of the bound program and its dual.

    Joint states pair a demand bit-pattern with a resource state index;
    ``a[i, m]`` is application m's next-slot ON probability from demand state
    ``i``. ``probs`` may come from true or estimated statistics. ``V >= 1``
    scales rewards against costs in the dual.
    """

    a: np.ndarray              # (2, M) next-slot ON probabilities
    unit_cost: np.ndarray      # (K, M)
    mean_cost: np.ndarray      # (M,)
    r_pre: np.ndarray          # (M,)
    r_cur: np.ndarray          # (M,)
    demand: np.ndarray         # (H, M) int8 demand bit patterns
    resource_index: np.ndarray  # (H,)
    probs: np.ndarray          # (H,) stationary joint-state probabilities
    caps: np.ndarray | None    # (K,) cardinality caps, or None
    rho: float
    V: float

    def __post_init__(self):
        if self.V < 1.0:
            raise ValueError(f"scale parameter V must be >= 1, got {self.V}")
        if np.any(self.a < 0.0) or np.any(self.a > 1.0):
            raise ValueError("transition probabilities must lie in [0, 1]")

    @property
    def n_states(self) -> int:
        return self.demand.shape[0]

    @property
    def n_apps(self) -> int:
        return self.demand.shape[1]

    @classmethod
    def from_scenario(
        cls,
        scenario: Scenario,
        V: float = 1.0,
        epsilon: np.ndarray | None = None,
        delta: np.ndarray | None = None,
        max_states: int = DEFAULT_STATE_CAP,
    ) -> "DualParams":
        """Assemble parameters from a scenario, optionally overriding the
        demand transition rates with estimates (the implied joint-state
        distribution is rebuilt from the rates in use)."""
        eps = scenario.epsilon if epsilon is None else np.asarray(epsilon, dtype=float)
        dlt = scenario.delta if delta is None else np.asarray(delta, dtype=float)
        if np.any(eps < 0) or np.any(eps > 1) or np.any(dlt < 0) or np.any(dlt > 1):
            raise ValueError("transition rates must lie in [0, 1]")
        m = scenario.n_apps
        k = scenario.resources.n_states
        count = (1 << m) * k
        if count > max_states:
            raise StateSpaceTooLarge(
                f"2^{m} * {k} = {count} joint states exceed the cap of {max_states}"
            )
        p_on = stationary_on(eps, dlt)
        patterns = ((np.arange(1 << m)[:, None] >> np.arange(m)[None, :]) & 1).astype(
            np.int8
        )
        p_demand = np.prod(np.where(patterns == 1, p_on, 1.0 - p_on), axis=1)
        demand = np.repeat(patterns, k, axis=0)
        resource_index = np.tile(np.arange(k), 1 << m)
        probs = np.repeat(p_demand, k) * np.tile(scenario.resources.probs, 1 << m)
        return cls(
            a=a_table(eps, dlt),
            unit_cost=scenario.costs.unit_cost,
            mean_cost=mean_unit_costs(scenario),
            r_pre=scenario.rewards.r_pre,
            r_cur=scenario.rewards.r_cur,
            demand=demand,
            resource_index=resource_index,
            probs=probs,
            caps=scenario.actions.caps,
            rho=scenario.rho,
            V=float(V),
        )


class DualMinimum(NamedTuple):
    gamma: float
    capped: bool


@dataclass(frozen=True, eq=False)
class BoundSolution:
    """Optimal value and an optimal policy of the bound program.

    ``policy[h]`` lists ``(action, weight)`` pairs for joint state h; weights
    are nonnegative, sum to one, and at most one state carries two actions
    (the single budget constraint forces at most one randomization).
    """

    value: float
    policy: tuple
    multiplier: float
    cost: float


class _Tables:
    """Per-state gain/differential arrays shared by the dual and the sweep."""

    def __init__(self, p: DualParams):
        self.p = p
        a_state = np.where(p.demand == 1, p.a[1], p.a[0])  # (H, M)
        self.a_state = a_state
        self.gain = p.V * a_state * (p.r_pre - p.r_cur)    # weight of switching mu to 1
        self.diff = p.unit_cost[p.resource_index] - a_state * p.mean_cost
        # per-cell switch thresholds; cells with a nonpositive differential
        # never switch off (their weight stays nonnegative for all gamma)
        positive = self.diff > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            self.thresholds = np.where(
                positive, self.gain / np.where(positive, self.diff, 1.0), np.inf
            )
        self.state_caps = (
            None if p.caps is None else p.caps[p.resource_index]  # (H,)
        )

    def masks(self, gamma: float) -> np.ndarray:
        """Per-state maximizers of the dual at ``gamma``.

        Eligibility compares ``gamma`` against the cell thresholds rather
        than testing weight signs, so a cell switching off at ``gamma`` is
        excluded even when its weight rounds to +-1 ulp instead of zero.
        Under caps the sort order of two weights is still float-ambiguous
        exactly at their crossing; callers that need segment-stable selections
        evaluate strictly between breakpoints.
        """
        eligible = gamma < self.thresholds
        if self.state_caps is None:
            return eligible.astype(np.int8)
        w = self.gain - gamma * self.diff
        out = np.zeros_like(self.p.demand)
        for h in range(w.shape[0]):
            cap = int(self.state_caps[h])
            order = np.lexsort(
                (np.arange(w.shape[1]), self.diff[h], -w[h])
            )
            taken = 0
            for idx in order:
                if taken >= cap:
                    break
                if eligible[h, idx]:
                    out[h, idx] = 1
                    taken += 1
        return out

    def rewards(self, masks: np.ndarray) -> np.ndarray:
        return (self.a_state * (self.p.r_cur + masks * (self.p.r_pre - self.p.r_cur))).sum(
            axis=1
        )

    def costs(self, masks: np.ndarray) -> np.ndarray:
        unit = self.p.unit_cost[self.p.resource_index]
        return (masks * unit + (1 - masks) * self.a_state * self.p.mean_cost).sum(axis=1)

    def expected_cost(self, gamma: float) -> float:
        return float(self.p.probs @ self.costs(self.masks(gamma)))

    def breakpoints(self) -> np.ndarray:
        """Candidate multipliers where some state's maximizer can change."""
        cand = []
        finite = np.isfinite(self.thresholds) & (self.thresholds > 0.0)
        if np.any(finite):
            cand.append(self.thresholds[finite])
        if self.state_caps is not None:
            # under a cap the selected set can also change where two weight
            # lines cross, not only where one crosses zero
            m = self.p.n_apps
            for i in range(m):
                for j in range(i + 1, m):
                    dd = self.diff[:, i] - self.diff[:, j]
                    with np.errstate(divide="ignore", invalid="ignore"):
                        g = (self.gain[:, i] - self.gain[:, j]) / dd
                    g = g[np.isfinite(g) & (g > 0.0)]
                    if g.size:
                        cand.append(g)
        if not cand:
            return np.empty(0)
        return np.unique(np.concatenate(cand))


def dual_state(gamma: float, h: int, params: DualParams) -> tuple[float, np.ndarray]:
    """Value and maximizing action of the dual term for joint state ``h``.

    The budget rate enters once per state, so summing ``probs[h] *
    dual_state(...)`` over all states reproduces the full dual.
    """
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    t = _Tables(params)
    w = t.gain[h] - gamma * t.diff[h]
    mask = t.masks(gamma)[h]
    base = float(
        (params.V * t.a_state[h] * params.r_cur).sum()
        - gamma * float((t.a_state[h] * params.mean_cost).sum())
    )
    value = base + float((mask * w).sum()) + gamma * params.rho
    return value, mask


def dual(gamma: float, params: DualParams) -> float:
    """The dual function: a convex, piecewise-linear function of ``gamma``."""
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    t = _Tables(params)
    masks = t.masks(gamma)
    w = t.gain - gamma * t.diff
    per_state = (
        (params.V * t.a_state * params.r_cur).sum(axis=1)
        - gamma * (t.a_state * params.mean_cost).sum(axis=1)
        + (masks * w).sum(axis=1)
        + gamma * params.rho
    )
    return float(params.probs @ per_state)


def minimize_dual(params: DualParams, gamma_cap: float) -> DualMinimum:
    """Minimize the dual over ``[0, gamma_cap]``.

    The subgradient is ``rho`` minus the expected cost of the per-state
    maximizers, nondecreasing in ``gamma``; bisection brackets its sign
    change to within 1e-12 and the result is snapped onto an exact
    breakpoint when one lies in the bracket. If the subgradient stays
    negative over the whole interval the minimizer is unbounded and
    ``gamma_cap`` is returned flagged as capped.
    """
    if gamma_cap <= 0.0:
        raise ValueError("gamma_cap must be positive")
    t = _Tables(params)
    rho = params.rho
    if rho - t.expected_cost(0.0) >= 0.0:
        return DualMinimum(0.0, False)
    if rho - t.expected_cost(gamma_cap) < 0.0:
        return DualMinimum(float(gamma_cap), True)
    lo, hi = 0.0, float(gamma_cap)
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if rho - t.expected_cost(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    if t.state_caps is None:
        taus = t.thresholds[np.isfinite(t.thresholds)]
        near = taus[np.abs(taus - hi) <= 1e-9]
        if near.size:
            exact = float(near.min())
            if rho - t.expected_cost(exact) >= 0.0:
                return DualMinimum(exact, False)
    return DualMinimum(hi, False)


def _pure_policy(masks: np.ndarray) -> tuple:
    return tuple(((tuple(int(b) for b in mask), 1.0),) for mask in masks)


def _mix_at_breakpoint(
    t: _Tables, tau: float, minus: np.ndarray, plus: np.ndarray
) -> BoundSolution:
    """Blend the action choices bracketing the budget-crossing breakpoint.

    Both sides maximize the dual at ``tau``, so any budget-tight mixture of
    them is optimal; switching states are flipped back toward the expensive
    side in index order until the budget is exactly exhausted, leaving at
    most one fractional state.
    """
    probs = t.p.probs
    rho = t.p.rho
    cost_minus = t.costs(minus)
    cost_plus = t.costs(plus)
    reward_minus = t.rewards(minus)
    reward_plus = t.rewards(plus)
    total_cost = float(probs @ cost_plus)
    total_reward = float(probs @ reward_plus)
    slack = max(rho - total_cost, 0.0)
    policy = [((tuple(int(b) for b in plus[h]), 1.0),) for h in range(t.p.n_states)]
    switching = np.nonzero(np.any(minus != plus, axis=1))[0]
    for h in switching:
        dc = float(probs[h]) * float(cost_minus[h] - cost_plus[h])
        if dc <= 1e-15:
            continue  # cost-neutral switch: both sides already optimal
        dr = float(probs[h]) * float(reward_minus[h] - reward_plus[h])
        if dc <= slack + 1e-15:
            policy[h] = ((tuple(int(b) for b in minus[h]), 1.0),)
            slack -= dc
            total_cost += dc
            total_reward += dr
        else:
            w = slack / dc
            policy[h] = (
                (tuple(int(b) for b in minus[h]), w),
                (tuple(int(b) for b in plus[h]), 1.0 - w),
            )
            total_cost += slack
            total_reward += w * dr
            slack = 0.0
            break
    return BoundSolution(
        value=total_reward, policy=tuple(policy), multiplier=float(tau), cost=total_cost
    )


def intelligence_bound(
    scenario: Scenario,
    V: float = 1.0,
    max_states: int = DEFAULT_STATE_CAP,
) -> BoundSolution:
    """Solve the bound program exactly by the parametric multiplier sweep.

    Returns the maximum achievable average reward, an optimal per-state
    policy, the optimal multiplier (which scales linearly in ``V``), and the
    achieved average cost. Raises :class:`InfeasibleBudget` when even the
    cheapest policy exceeds the budget rate, which happens for budgets below
    the passive-service cost floor.
    """
    params = DualParams.from_scenario(scenario, V=V, max_states=max_states)
    t = _Tables(params)
    rho = params.rho
    taus = t.breakpoints()
    # probe each segment strictly inside it: the per-state maximizer is
    # constant there and no weight tie can flip the selection
    if taus.size:
        probes = np.empty(taus.size + 1)
        probes[0] = 0.5 * taus[0]
        probes[1:-1] = 0.5 * (taus[:-1] + taus[1:])
        probes[-1] = taus[-1] + 1.0
    else:
        probes = np.array([1.0])
    masks0 = t.masks(float(probes[0]))
    cost0 = float(params.probs @ t.costs(masks0))
    if cost0 <= rho + 1e-12:
        return BoundSolution(
            value=float(params.probs @ t.rewards(masks0)),
            policy=_pure_policy(masks0),
            multiplier=0.0,
            cost=cost0,
        )
    prev_masks = masks0
    for i in range(1, probes.size):
        masks = t.masks(float(probes[i]))
        cost = float(params.probs @ t.costs(masks))
        if cost <= rho + 1e-12:
            return _mix_at_breakpoint(t, float(taus[i - 1]), prev_masks, masks)
        prev_masks = masks
    raise InfeasibleBudget(
        f"budget rate {rho} is below the minimum achievable average cost"
    )


def intelligence_at_max_budget(scenario: Scenario) -> float:
    """Closed form of the bound when the budget never binds.

    With enough budget every application is pre-served every slot, earning
    the pre-service reward at its stationary ON rate.
    """
    p_on = stationary_on(scenario.epsilon, scenario.delta)
    return float((p_on * scenario.rewards.r_pre).sum())


def policy_value(params: DualParams, policy: tuple) -> tuple[float, float]:
    """Recompute (reward, cost) of a per-state randomized policy from scratch."""
    t = _Tables(params)
    unit = params.unit_cost[params.resource_index]
    reward = 0.0
    cost = 0.0
    for h, entries in enumerate(policy):
        for action, weight in entries:
            mask = np.asarray(action, dtype=float)
            r = float(
                (t.a_state[h] * (params.r_cur + mask * (params.r_pre - params.r_cur))).sum()
            )
            c = float(
                (mask * unit[h] + (1.0 - mask) * t.a_state[h] * params.mean_cost).sum()
            )
            reward += float(params.probs[h]) * weight * r
            cost += float(params.probs[h]) * weight * c
    return reward, cost
