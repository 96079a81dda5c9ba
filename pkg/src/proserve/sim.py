"""Discrete-time simulation of pre-service policies.

A run samples demand and resource trajectories, lets a policy pick the
pre-service vector each slot, and records realized rewards and costs, the
effective cost driving the deficit queue, and the queue itself. One master
seed splits into named substreams (demand per application, resource draws,
learning samples) so different policies face identical randomness and any
trace is reproducible bit-exactly from (scenario, policy, seed).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import control, learning
from .errors import InsufficientHorizon
from .model import Scenario, a_table, mean_unit_costs, sample_chain
from .learning import Estimates, LearnedMultiplier


@dataclass(frozen=True)
class BISC:
    """Budget-limited controller using the true transition rates."""

    V: float


@dataclass(frozen=True)
class LBISC:
    """Learning-aided controller: estimate, learn the multiplier, control.

    Pre-serves everything for the first ``learning_T`` slots while samples
    accumulate, then estimates the rates, learns the empirical multiplier,
    resets the deficit, and runs the controller on the effective queue
    (deficit plus learned offset). ``learning_T=None`` uses ceil(V^(2/3)).
    """

    V: float
    f: int = 1
    learning_T: int | None = None
    independent_trajectories: bool = False


@dataclass(frozen=True)
class AlwaysPreserve:
    """Baseline: pre-serve a maximal feasible set every slot."""


@dataclass(frozen=True)
class NeverPreserve:
    """Baseline: never pre-serve; all demand is served passively."""


Policy = BISC | LBISC | AlwaysPreserve | NeverPreserve


def default_learning_T(V: float) -> int:
    return max(1, math.ceil(V ** (2.0 / 3.0)))


@dataclass(eq=False)
class RunTrace:
    """Per-slot records of one run plus the learning artifacts in use."""

    scenario: Scenario
    policy: Policy
    seed: object
    horizon: int
    demand: np.ndarray       # (horizon, M) int8
    resource: np.ndarray     # (horizon,)
    action: np.ndarray       # (horizon, M) int8 pre-service decisions
    mu_current: np.ndarray   # (horizon, M) int8 forced same-slot services
    reward: np.ndarray       # (horizon,) realized reward
    cost: np.ndarray         # (horizon,) realized cost
    eff_cost: np.ndarray     # (horizon,) effective cost driving the queue
    deficit: np.ndarray      # (horizon,) queue before the slot's update
    eff_queue: np.ndarray    # (horizon,) deficit plus the active offset
    learn_T: int = 0
    offset: float = 0.0
    gamma_T: float = math.nan
    theta: float = math.nan
    estimates: Estimates | None = None


@dataclass(frozen=True)
class Metrics:
    """Long-run averages of a trace (post-learning by default)."""

    r_av: float
    c_av: float
    d_bar: float
    t_conv: float
    d_tilde_max: float


def _lbisc_setup(
    scenario: Scenario, policy: LBISC, rng: np.random.Generator
) -> tuple[int, Estimates, LearnedMultiplier]:
    T = policy.learning_T or default_learning_T(policy.V)
    stream = learning.generate_stream(
        scenario, policy.f, T, rng, policy.independent_trajectories
    )
    est = learning.mle_estimate(stream).resolved()
    if np.any(est.eps_hat + est.delta_hat <= 0.0):
        # degenerate estimate (no transitions observed at all); fall back to
        # the prior so control stays runnable
        warnings.warn("degenerate rate estimates replaced by the prior", stacklevel=2)
        bad = est.eps_hat + est.delta_hat <= 0.0
        est = Estimates(
            eps_hat=np.where(bad, learning.PRIOR_RATE, est.eps_hat),
            delta_hat=np.where(bad, learning.PRIOR_RATE, est.delta_hat),
            n_samples=est.n_samples,
            visits=est.visits,
            transitions=est.transitions,
        )
    lm = learning.dual_learning(est, scenario, policy.V)
    return T, est, lm


def run(scenario: Scenario, policy: Policy, horizon: int, seed) -> RunTrace:
    """Simulate one policy for ``horizon`` slots.

    ``seed`` may be an int or a tuple of ints; it deterministically derives
    the demand, resource, and learning substreams.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    m = scenario.n_apps
    children = np.random.SeedSequence(seed).spawn(m + 2)
    demand = np.empty((horizon, m), dtype=np.int8)
    for j, chain in enumerate(scenario.chains):
        demand[:, j] = sample_chain(chain, horizon, np.random.default_rng(children[j]))
    resource = scenario.resources.sample(horizon, np.random.default_rng(children[m]))

    true_a = a_table(scenario.epsilon, scenario.delta)
    learn_T = 0
    offset = 0.0
    gamma_T = math.nan
    theta = math.nan
    estimates = None
    a_use = true_a
    if isinstance(policy, BISC):
        V = policy.V
        mode = "control"
    elif isinstance(policy, LBISC):
        V = policy.V
        mode = "control"
        learn_T, estimates, lm = _lbisc_setup(
            scenario, policy, np.random.default_rng(children[m + 1])
        )
        offset = lm.offset
        gamma_T = lm.gamma_T
        theta = lm.theta
        a_use = estimates.a_table()
    elif isinstance(policy, AlwaysPreserve):
        V = 1.0
        mode = "always"
    elif isinstance(policy, NeverPreserve):
        V = 1.0
        mode = "never"
    else:
        raise TypeError(f"unknown policy {policy!r}")

    k_states = scenario.resources.n_states
    r_cur = scenario.rewards.r_cur.tolist()
    r_diff = scenario.rewards.r_diff.tolist()
    mean_cost = mean_unit_costs(scenario)
    unit = scenario.costs.unit_cost.tolist()
    rho = scenario.rho
    rng_m = range(m)

    # decision thresholds for the unconstrained fast path: pre-serve iff the
    # effective queue is strictly below gain/differential (always, when the
    # differential is nonpositive)
    constrained = scenario.actions.caps is not None
    gain = V * a_use * scenario.rewards.r_diff.reshape(1, -1)          # (2, M)
    diffs = scenario.costs.unit_cost[:, None, :] - a_use[None, :, :] * mean_cost
    with np.errstate(divide="ignore", invalid="ignore"):
        tau_arr = np.where(
            diffs > 0.0, gain[None, :, :] / np.where(diffs > 0.0, diffs, 1.0), math.inf
        )  # (K, 2, M)
    tau = tau_arr.tolist()
    pc_use = (a_use * mean_cost).tolist()    # (2, M) effective cost of waiting
    pc_true = (true_a * mean_cost).tolist()
    base_action = [
        control.estimation_action(scenario, k).tolist() for k in range(k_states)
    ]
    zeros = [0] * m

    action = np.empty((horizon, m), dtype=np.int8)
    mu_current = np.empty((horizon, m), dtype=np.int8)
    reward = np.empty(horizon)
    cost = np.empty(horizon)
    eff_cost = np.empty(horizon)
    deficit = np.empty(horizon)
    eff_queue = np.empty(horizon)

    demand_rows = demand.tolist()
    resource_ids = resource.tolist()
    state = control.ControllerState(V=V, a_hat=a_use, offset=offset)
    d = 0.0
    prev_mu = zeros
    for t in range(horizon):
        a_row = demand_rows[t]
        k = resource_ids[t]
        in_learning = t < learn_T
        if mode == "never":
            mu = zeros
        elif mode == "always" or in_learning:
            mu = base_action[k]
        elif constrained:
            state.deficit = d
            mu = control.decide(state, a_row, k, scenario).tolist()
        else:
            dt = d + offset
            tau_k = tau[k]
            mu = [1 if dt < tau_k[a_row[j]][j] else 0 for j in rng_m]
        pc_row = pc_true if in_learning else pc_use
        unit_k = unit[k]
        ec = 0.0
        c = 0.0
        r = 0.0
        for j in rng_m:
            aj = a_row[j]
            muj = mu[j]
            ec += unit_k[j] if muj else pc_row[aj][j]
            mc = 1 if (aj == 1 and prev_mu[j] == 0) else 0
            mu_current[t, j] = mc
            c += (mc + muj) * unit_k[j]
            if aj:
                r += r_cur[j] + prev_mu[j] * r_diff[j]
        action[t] = mu
        reward[t] = r
        cost[t] = c
        eff_cost[t] = ec
        deficit[t] = d
        eff_queue[t] = d + (0.0 if in_learning else offset)
        d = max(d + ec - rho, 0.0)
        if t + 1 == learn_T:
            d = 0.0  # queue reset when control takes over
        prev_mu = mu

    return RunTrace(
        scenario=scenario,
        policy=policy,
        seed=seed,
        horizon=horizon,
        demand=demand,
        resource=resource,
        action=action,
        mu_current=mu_current,
        reward=reward,
        cost=cost,
        eff_cost=eff_cost,
        deficit=deficit,
        eff_queue=eff_queue,
        learn_T=learn_T,
        offset=offset,
        gamma_T=gamma_T,
        theta=theta,
        estimates=estimates,
    )


def convergence_time(trace: RunTrace, gamma_star: float, zeta: float) -> float:
    """First slot where the effective queue is within ``zeta`` of the target
    multiplier, measured from slot 0 (learning slots included); ``inf`` when
    it never happens."""
    if zeta <= 0.0:
        raise ValueError("zeta must be positive")
    hits = np.abs(trace.eff_queue - gamma_star) <= zeta
    idx = np.nonzero(hits)[0]
    return float(idx[0]) if idx.size else math.inf


def sliding_convergence_time(
    trace: RunTrace, gamma_star: float, zeta: float, window: int = 50
) -> float:
    """First slot opening a ``window``-slot stretch that stays within
    ``zeta`` of the target; robust to single-slot excursions."""
    if zeta <= 0.0:
        raise ValueError("zeta must be positive")
    within = (np.abs(trace.eff_queue - gamma_star) <= zeta).astype(np.int64)
    if within.size < window:
        return math.inf
    sums = np.convolve(within, np.ones(window, dtype=np.int64), mode="valid")
    idx = np.nonzero(sums == window)[0]
    return float(idx[0]) if idx.size else math.inf


def time_averages(
    trace: RunTrace,
    include_learning: bool = False,
    gamma_star: float | None = None,
    zeta: float | None = None,
    window: int = 50,
) -> Metrics:
    """Arithmetic means over the control slots (or the whole trace).

    Convergence time is the sliding-window variant against ``gamma_star``
    when both it and ``zeta`` are given, NaN otherwise. The maximum effective
    queue follows the same slice as the means: the queue ceiling governs the
    control phase, which starts from a reset queue.
    """
    start = 0 if include_learning else trace.learn_T
    if start >= trace.horizon:
        raise InsufficientHorizon("no control slots in the trace")
    t_conv = math.nan
    if gamma_star is not None and zeta is not None:
        t_conv = sliding_convergence_time(trace, gamma_star, zeta, window)
    return Metrics(
        r_av=float(trace.reward[start:].mean()),
        c_av=float(trace.cost[start:].mean()),
        d_bar=float(trace.deficit[start:].mean()),
        t_conv=t_conv,
        d_tilde_max=float(trace.eff_queue[start:].max()),
    )


def deficit_steady_level(trace: RunTrace, t_conv: float | None = None) -> float:
    """Mean deficit over the final third of the horizon.

    When a convergence time is supplied the trace must be at least twice that
    long, otherwise :class:`InsufficientHorizon` is raised.
    """
    if trace.horizon < 3:
        raise InsufficientHorizon("trace too short for a steady-level estimate")
    if t_conv is not None and (
        not math.isfinite(t_conv) or trace.horizon < 2 * t_conv
    ):
        raise InsufficientHorizon(
            f"horizon {trace.horizon} shorter than twice the convergence time {t_conv}"
        )
    return float(trace.deficit[2 * trace.horizon // 3 :].mean())


def write_trace_csv(trace: RunTrace, path) -> None:
    """Export one row per slot; UTF-8, LF line endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,deficit,eff_queue,reward,cost,eff_cost,action_bits\n")
        for t in range(trace.horizon):
            bits = "".join(str(int(b)) for b in trace.action[t])
            fh.write(
                f"{t},{trace.deficit[t]:.10g},{trace.eff_queue[t]:.10g},"
                f"{trace.reward[t]:.10g},{trace.cost[t]:.10g},"
                f"{trace.eff_cost[t]:.10g},{bits}\n"
            )
