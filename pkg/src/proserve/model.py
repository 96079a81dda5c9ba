"""System primitives: demand chains, resource states, costs, rewards, action sets.

A server manages M applications. Each application's demand is a two-state
(OFF/ON) Markov chain sampled once per slot; the server may *pre-serve* the
next slot's potential demand (earning the higher reward if it materializes)
or wait and serve it passively. Serving happens under an i.i.d. resource
state that sets per-application unit costs and may constrain which subsets of
applications can be pre-served.

All types here are immutable after construction and safe to share across
threads; anything random takes an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChain, StateSpaceTooLarge

#: Default cap on the number of enumerable joint demand/resource states.
DEFAULT_STATE_CAP = 1 << 20


@dataclass(frozen=True)
class DemandChain:
    """Two-state Markov demand chain.

    ``epsilon`` is the OFF->ON transition probability per slot and ``delta``
    the ON->OFF probability. State 1 means a unit demand is present.
    """

    epsilon: float
    delta: float

    def __post_init__(self):
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")


def transition_prob(chain: DemandChain, i: int) -> float:
    """Probability that demand is ON next slot given the current state ``i``.

    Returns ``1 - delta`` from the ON state and ``epsilon`` from OFF.
    """
    if i not in (0, 1):
        raise ValueError(f"state bit must be 0 or 1, got {i}")
    return 1.0 - chain.delta if i == 1 else chain.epsilon


def steady_state(chain: DemandChain) -> tuple[float, float]:
    """Stationary distribution ``(P(OFF), P(ON))`` of the chain.

    Raises :class:`DegenerateChain` when ``epsilon + delta == 0`` (both states
    absorbing, no unique stationary law).
    """
    total = chain.epsilon + chain.delta
    if total <= 0.0:
        raise DegenerateChain("epsilon + delta must be positive for a stationary law")
    p_on = chain.epsilon / total
    return 1.0 - p_on, p_on


def _binary_entropy(p: float) -> float:
    # bits; 0 log 0 := 0
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy_rate(chain: DemandChain) -> float:
    """Entropy rate of the chain in bits per slot.

    Stationary mixture of the per-state transition entropies:
    ``P(OFF) * H_b(epsilon) + P(ON) * H_b(delta)``.
    """
    p_off, p_on = steady_state(chain)
    return p_off * _binary_entropy(chain.epsilon) + p_on * _binary_entropy(chain.delta)


def sample_chain(
    chain: DemandChain,
    n: int,
    rng: np.random.Generator,
    initial: int | None = None,
) -> np.ndarray:
    """Sample ``n`` consecutive demand states.

    The start state is drawn from the stationary distribution unless
    ``initial`` is given; long-run averages then need no burn-in. Sampling
    draws geometric sojourn lengths in batches, so the cost is proportional
    to the number of state switches rather than ``n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if initial is None:
        _, p_on = steady_state(chain)
        state = int(rng.random() < p_on)
    else:
        state = int(initial)
        if state not in (0, 1):
            raise ValueError("initial state must be 0 or 1")
    out = np.empty(n, dtype=np.int8)
    pos = 0
    while pos < n:
        leave = chain.delta if state == 1 else chain.epsilon
        if leave <= 0.0:
            out[pos:] = state
            break
        other_leave = chain.epsilon if state == 1 else chain.delta
        need = n - pos
        if other_leave <= 0.0:
            # one sojourn here, then absorbed in the other state
            stay = min(int(rng.geometric(leave)), need)
            out[pos : pos + stay] = state
            out[pos + stay :] = 1 - state
            break
        mean_pair = 1.0 / leave + 1.0 / other_leave
        n_pairs = int(need / mean_pair) + 4
        lengths = np.empty(2 * n_pairs, dtype=np.int64)
        lengths[0::2] = rng.geometric(leave, size=n_pairs)
        lengths[1::2] = rng.geometric(other_leave, size=n_pairs)
        values = np.empty(2 * n_pairs, dtype=np.int8)
        values[0::2] = state
        values[1::2] = 1 - state
        total = int(lengths.sum())
        if total <= need:
            out[pos : pos + total] = np.repeat(values, lengths)
            pos += total
            # an even number of runs was consumed, so `state` is unchanged
        else:
            cum = np.cumsum(lengths)
            idx = int(np.searchsorted(cum, need, side="left"))
            prev = int(cum[idx - 1]) if idx > 0 else 0
            lengths[idx] = need - prev
            out[pos:] = np.repeat(values[: idx + 1], lengths[: idx + 1])
            break
    return out


@dataclass(frozen=True, eq=False)
class ResourceModel:
    """Joint distribution of per-application resource conditions.

    ``states`` is a (K, M) array whose row k holds the per-application
    condition labels of resource state k; ``probs`` are the K state
    probabilities. Draws are i.i.d. across slots and independent of demand.
    """

    states: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=float))
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.shape[0] != states.shape[0]:
            raise ValueError("probs must have one entry per resource state")
        if np.any(probs < 0.0):
            raise ValueError("resource probabilities must be nonnegative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError("resource probabilities must sum to 1 within 1e-12")

    @property
    def n_states(self) -> int:
        return self.states.shape[0]

    @property
    def n_apps(self) -> int:
        return self.states.shape[1]

    @classmethod
    def product_form(cls, values, probs) -> "ResourceModel":
        """Build the joint model from independent per-application conditions.

        ``values[m]`` lists application m's possible condition labels and
        ``probs[m]`` their probabilities; the joint support is the product of
        the per-application outcomes.
        """
        if len(values) != len(probs):
            raise ValueError("values and probs must list one entry per application")
        index_ranges = [range(len(v)) for v in values]
        rows = []
        joint = []
        for combo in itertools.product(*index_ranges):
            rows.append([values[m][j] for m, j in enumerate(combo)])
            p = 1.0
            for m, j in enumerate(combo):
                p *= probs[m][j]
            joint.append(p)
        return cls(np.asarray(rows, dtype=float), np.asarray(joint, dtype=float))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` i.i.d. resource state indices."""
        return rng.choice(self.n_states, size=n, p=self.probs)


@dataclass(frozen=True, eq=False)
class CostModel:
    """Per-application unit service costs under each resource state.

    ``unit_cost[k, m]`` is the cost of one service to application m under
    resource state k; the idle action costs nothing.
    """

    unit_cost: np.ndarray

    def __post_init__(self):
        unit = np.atleast_2d(np.asarray(self.unit_cost, dtype=float))
        object.__setattr__(self, "unit_cost", unit)
        if np.any(unit < 0.0):
            raise ValueError("unit costs must be nonnegative")

    @property
    def c_max(self) -> float:
        return float(self.unit_cost.max()) if self.unit_cost.size else 0.0

    @classmethod
    def from_resource_values(cls, resources: ResourceModel) -> "CostModel":
        """Use the resource condition labels themselves as unit costs."""
        return cls(resources.states.copy())


@dataclass(frozen=True, eq=False)
class RewardModel:
    """Per-application rewards for pre-served versus same-slot service."""

    r_pre: np.ndarray
    r_cur: np.ndarray

    def __post_init__(self):
        r_pre = np.asarray(self.r_pre, dtype=float)
        r_cur = np.asarray(self.r_cur, dtype=float)
        object.__setattr__(self, "r_pre", r_pre)
        object.__setattr__(self, "r_cur", r_cur)
        if r_pre.shape != r_cur.shape:
            raise ValueError("r_pre and r_cur must have matching shapes")
        if np.any(r_cur < 0.0) or np.any(r_pre < r_cur):
            raise ValueError("rewards must satisfy r_pre >= r_cur >= 0")

    @property
    def r_diff(self) -> np.ndarray:
        return self.r_pre - self.r_cur

    @property
    def max_diff(self) -> float:
        return float(self.r_diff.max()) if self.r_diff.size else 0.0


@dataclass(frozen=True, eq=False)
class ActionSetSpec:
    """Feasible pre-service action sets, one per resource state.

    ``caps is None`` means every binary vector is feasible; otherwise
    ``caps[k]`` bounds the number of simultaneously pre-served applications
    under resource state k. Every feasible set is down-closed: zeroing any
    entry of a feasible vector stays feasible.
    """

    caps: np.ndarray | None = None

    def __post_init__(self):
        if self.caps is not None:
            caps = np.asarray(self.caps, dtype=int)
            object.__setattr__(self, "caps", caps)
            if np.any(caps < 0):
                raise ValueError("cardinality caps must be nonnegative")

    @classmethod
    def unconstrained(cls) -> "ActionSetSpec":
        return cls(None)

    @classmethod
    def cardinality(cls, caps) -> "ActionSetSpec":
        return cls(np.asarray(caps, dtype=int))

    def cap_for(self, resource_index: int) -> int | None:
        if self.caps is None:
            return None
        return int(self.caps[resource_index])


@dataclass(frozen=True, eq=False)
class Scenario:
    """A complete system instance.

    ``rho`` is the budget rate on average cost. The range ``0 < rho <=
    rho_max`` is checked with a warning rather than rejected: budgets above
    ``rho_max`` simply leave the constraint slack.
    """

    chains: tuple[DemandChain, ...]
    resources: ResourceModel
    costs: CostModel
    rewards: RewardModel
    actions: ActionSetSpec
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "chains", tuple(self.chains))
        m = len(self.chains)
        if self.resources.n_apps != m:
            raise ValueError("resource model must cover every application")
        if self.costs.unit_cost.shape != (self.resources.n_states, m):
            raise ValueError("cost table must be shaped (n_states, n_apps)")
        if self.rewards.r_pre.shape != (m,):
            raise ValueError("reward model must cover every application")
        if self.actions.caps is not None and self.actions.caps.shape != (
            self.resources.n_states,
        ):
            raise ValueError("one cardinality cap per resource state required")
        limit = rho_max(self)
        if not (0.0 < self.rho <= limit + 1e-12):
            warnings.warn(
                f"budget rate rho={self.rho} outside (0, rho_max={limit:.6g}]",
                stacklevel=2,
            )

    @property
    def n_apps(self) -> int:
        return len(self.chains)

    @property
    def epsilon(self) -> np.ndarray:
        return np.array([c.epsilon for c in self.chains])

    @property
    def delta(self) -> np.ndarray:
        return np.array([c.delta for c in self.chains])


@dataclass(frozen=True)
class JointState:
    """One joint demand/resource state with its stationary probability."""

    demand: tuple[int, ...]
    resource_index: int
    prob: float


def a_table(epsilon: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Next-slot ON probabilities as a (2, M) table indexed by current state.

    Row 0 holds ``epsilon`` (from OFF), row 1 holds ``1 - delta`` (from ON).
    """
    epsilon = np.asarray(epsilon, dtype=float)
    delta = np.asarray(delta, dtype=float)
    return np.vstack([epsilon, 1.0 - delta])


def stationary_on(epsilon: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Per-application stationary ON probabilities ``eps / (eps + delta)``."""
    epsilon = np.asarray(epsilon, dtype=float)
    delta = np.asarray(delta, dtype=float)
    total = epsilon + delta
    if np.any(total <= 0.0):
        raise DegenerateChain("epsilon + delta must be positive for a stationary law")
    return epsilon / total


def enumerate_joint_states(
    scenario: Scenario, max_states: int = DEFAULT_STATE_CAP
) -> list[JointState]:
    """Enumerate all joint demand/resource states with product-form probabilities.

    There are ``2**M * K`` states; raises :class:`StateSpaceTooLarge` when that
    exceeds ``max_states``. Demand patterns are ordered by integer index with
    application 0 in the least significant bit, resource states minor.
    """
    m = scenario.n_apps
    k = scenario.resources.n_states
    count = (1 << m) * k
    if count > max_states:
        raise StateSpaceTooLarge(
            f"2^{m} * {k} = {count} joint states exceed the cap of {max_states}"
        )
    p_on = stationary_on(scenario.epsilon, scenario.delta)
    states: list[JointState] = []
    for bits in range(1 << m):
        demand = tuple((bits >> j) & 1 for j in range(m))
        p_demand = 1.0
        for j, b in enumerate(demand):
            p_demand *= p_on[j] if b else 1.0 - p_on[j]
        for ki in range(k):
            states.append(
                JointState(demand, ki, p_demand * float(scenario.resources.probs[ki]))
            )
    return states


def feasible_actions(
    actions: ActionSetSpec, resource_index: int, n_apps: int
) -> list[np.ndarray]:
    """Enumerate every feasible pre-service vector under one resource state.

    Exponential in the number of applications; meant for small instances and
    test oracles, not the per-slot control path.
    """
    cap = actions.cap_for(resource_index)
    out = []
    for bits in range(1 << n_apps):
        vec = np.array([(bits >> j) & 1 for j in range(n_apps)], dtype=np.int8)
        if cap is None or int(vec.sum()) <= cap:
            out.append(vec)
    return out


def rho_max(scenario: Scenario) -> float:
    """Budget rate that funds pre-serving every application every slot."""
    return float(scenario.resources.probs @ scenario.costs.unit_cost.sum(axis=1))


def mean_unit_cost(scenario: Scenario, m: int) -> float:
    """Expected unit cost of one service to application ``m``."""
    return float(scenario.resources.probs @ scenario.costs.unit_cost[:, m])


def mean_unit_costs(scenario: Scenario) -> np.ndarray:
    """Expected unit cost per application, as a vector."""
    return scenario.resources.probs @ scenario.costs.unit_cost


def max_weight_action(
    weights: np.ndarray, tie_diffs: np.ndarray, cap: int | None
) -> np.ndarray:
    """Pick the feasible pre-service vector with the largest total weight.

    An application is worth including iff its weight is positive, or zero
    with a nonpositive cost differential (pre-serving then costs no more
    than waiting). Under a cardinality cap the weights are sorted and the
    top eligible entries taken; ties prefer the smaller differential, then
    the smaller index, which keeps the output deterministic.
    """
    weights = np.asarray(weights, dtype=float)
    tie_diffs = np.asarray(tie_diffs, dtype=float)
    eligible = (weights > 0.0) | ((weights == 0.0) & (tie_diffs <= 0.0))
    mask = np.zeros(weights.shape[0], dtype=np.int8)
    if cap is None:
        mask[eligible] = 1
        return mask
    order = np.lexsort((np.arange(weights.shape[0]), tie_diffs, -weights))
    taken = 0
    for idx in order:
        if taken >= cap:
            break
        if eligible[idx]:
            mask[idx] = 1
            taken += 1
    return mask
