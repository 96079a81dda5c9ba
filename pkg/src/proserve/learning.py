"""Sample streams, transition-rate estimation, and dual learning.

During a learning window of T slots the system collects N(T) = f * T demand
samples per application, where the population factor f counts similar users
contributing useful samples. Transition rates are estimated by empirical
frequencies; the estimated statistics then parameterize the dual, whose
minimizer becomes the empirical multiplier that warm-starts the controller.
All logarithms in the tuning rules are base 10.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .bound import DualParams, minimize_dual
from .errors import UndefinedEstimate
from .model import Scenario, a_table, sample_chain, stationary_on

#: Fallback transition rate when a demand state was never visited.
PRIOR_RATE = 0.5


@dataclass(frozen=True, eq=False)
class SampleStream:
    """Per-application demand samples collected over a learning window.

    ``samples[m]`` holds application m's N(T) = f * T demand bits. By default
    each application contributes one contiguous trajectory; when built from f
    independent length-T trajectories, ``segment_length`` records the
    boundary spacing so estimation skips the seams.
    """

    samples: np.ndarray  # (M, N) int8
    T: int
    f: int
    scenario: Scenario
    segment_length: int | None = None

    def __post_init__(self):
        if self.f < 1 or self.T < 1:
            raise ValueError("population factor and learning window must be >= 1")
        if self.samples.shape[1] != self.f * self.T:
            raise ValueError("stream must hold f * T samples per application")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True, eq=False)
class Estimates:
    """Empirical transition rates with their underlying counts.

    Rates that could not be estimated (a state never visited) are NaN;
    ``resolved()`` substitutes the uninformative prior with a warning.
    """

    eps_hat: np.ndarray
    delta_hat: np.ndarray
    n_samples: int
    visits: np.ndarray       # (M, 2) visit counts of states 0 and 1
    transitions: np.ndarray  # (M, 2) counts of 0->1 and 1->0 transitions

    @property
    def undefined(self) -> np.ndarray:
        return np.isnan(self.eps_hat) | np.isnan(self.delta_hat)

    def require_defined(self) -> None:
        if bool(self.undefined.any()):
            apps = np.nonzero(self.undefined)[0].tolist()
            raise UndefinedEstimate(
                f"transition rates undefined for applications {apps}; "
                "a demand state was never visited"
            )

    def resolved(self, prior: float = PRIOR_RATE) -> "Estimates":
        """Fill undefined rates with ``prior`` (warns when anything changes)."""
        if not bool(self.undefined.any()):
            return self
        warnings.warn(
            "undefined transition-rate estimates replaced by the "
            f"uninformative prior {prior}",
            stacklevel=2,
        )
        return replace(
            self,
            eps_hat=np.where(np.isnan(self.eps_hat), prior, self.eps_hat),
            delta_hat=np.where(np.isnan(self.delta_hat), prior, self.delta_hat),
        )

    def a_table(self) -> np.ndarray:
        self.require_defined()
        return a_table(self.eps_hat, self.delta_hat)

    def pi_on(self) -> np.ndarray:
        """Implied per-application stationary ON probabilities."""
        self.require_defined()
        return stationary_on(self.eps_hat, self.delta_hat)

    def joint_state_probs(self, scenario: Scenario) -> np.ndarray:
        """Implied joint demand/resource distribution (sums to one).

        Product form: per-application stationary laws from the estimated
        rates times the known resource-state probabilities, ordered like
        the joint-state enumeration.
        """
        p_on = self.pi_on()
        m = p_on.shape[0]
        patterns = ((np.arange(1 << m)[:, None] >> np.arange(m)[None, :]) & 1).astype(
            np.int8
        )
        p_demand = np.prod(np.where(patterns == 1, p_on, 1.0 - p_on), axis=1)
        return np.repeat(p_demand, scenario.resources.n_states) * np.tile(
            scenario.resources.probs, 1 << m
        )


@dataclass(frozen=True)
class LearnedMultiplier:
    """Output of dual learning: the empirical multiplier and its compensation.

    ``gamma_T`` never exceeds the cap ``V * log10(V)``; ``capped`` marks that
    the empirical dual had an unbounded minimizer. The controller's queue
    offset is ``max(gamma_T - theta, 0)``.
    """

    gamma_T: float
    capped: bool
    theta: float

    @property
    def offset(self) -> float:
        return max(self.gamma_T - self.theta, 0.0)


def gamma_cap(V: float) -> float:
    """Search cap for the empirical multiplier, ``V * log10(V)`` (at least 1)."""
    return max(V * math.log10(V), 1.0)


def theta_rule(V: float, n_samples: int) -> float:
    """Compensation subtracted from the learned multiplier.

    Shrinks with the sample count down to its floor ``log10(V)**2``, reached
    once ``n_samples >= V**2``.
    """
    lv2 = math.log10(V) ** 2
    return max(V * lv2 / math.sqrt(n_samples), lv2)


def generate_stream(
    scenario: Scenario,
    f: int,
    T: int,
    rng: np.random.Generator,
    independent_trajectories: bool = False,
) -> SampleStream:
    """Draw the learning samples for every application.

    Each application yields one contiguous stationary-start trajectory of
    length f * T, or, when ``independent_trajectories`` is set, f independent
    trajectories of length T.
    """
    if f < 1 or T < 1:
        raise ValueError("population factor and learning window must be >= 1")
    n = f * T
    rows = []
    for chain in scenario.chains:
        if independent_trajectories:
            rows.append(
                np.concatenate([sample_chain(chain, T, rng) for _ in range(f)])
            )
        else:
            rows.append(sample_chain(chain, n, rng))
    return SampleStream(
        samples=np.vstack(rows),
        T=T,
        f=f,
        scenario=scenario,
        segment_length=T if independent_trajectories else None,
    )


def mle_estimate(stream: SampleStream) -> Estimates:
    """Empirical-frequency estimates of the transition rates.

    Counts transitions over consecutive sample pairs (skipping pairs that
    straddle trajectory seams); the rate out of a state is the transition
    count divided by that state's visits among the pair-leading samples.
    """
    samples = stream.samples
    m, n = samples.shape
    if n < 2:
        raise ValueError("need at least two samples per application")
    lead = samples[:, :-1]
    succ = samples[:, 1:]
    valid = np.ones(n - 1, dtype=bool)
    if stream.segment_length is not None:
        valid[stream.segment_length - 1 :: stream.segment_length] = False
    n0 = ((lead == 0) & valid).sum(axis=1)
    n1 = ((lead == 1) & valid).sum(axis=1)
    n01 = ((lead == 0) & (succ == 1) & valid).sum(axis=1)
    n10 = ((lead == 1) & (succ == 0) & valid).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        eps_hat = np.where(n0 > 0, n01 / np.maximum(n0, 1), np.nan)
        delta_hat = np.where(n1 > 0, n10 / np.maximum(n1, 1), np.nan)
    return Estimates(
        eps_hat=eps_hat,
        delta_hat=delta_hat,
        n_samples=n,
        visits=np.stack([n0, n1], axis=1),
        transitions=np.stack([n01, n10], axis=1),
    )


def estimation_error(estimates: Estimates, scenario: Scenario) -> float:
    """Largest absolute rate error over all applications and both rates."""
    estimates.require_defined()
    return float(
        max(
            np.abs(estimates.eps_hat - scenario.epsilon).max(),
            np.abs(estimates.delta_hat - scenario.delta).max(),
        )
    )


def dual_learning(
    estimates: Estimates, scenario: Scenario, V: float
) -> LearnedMultiplier:
    """Minimize the empirical dual built from the estimated statistics.

    The joint-state distribution implied by the estimates replaces the true
    one, the minimizer is searched over ``[0, V * log10(V)]``, and the
    compensation parameter is filled from the stream's sample count.
    """
    estimates.require_defined()
    params = DualParams.from_scenario(
        scenario, V=V, epsilon=estimates.eps_hat, delta=estimates.delta_hat
    )
    result = minimize_dual(params, gamma_cap(V))
    return LearnedMultiplier(
        gamma_T=result.gamma,
        capped=result.capped,
        theta=theta_rule(V, estimates.n_samples),
    )
