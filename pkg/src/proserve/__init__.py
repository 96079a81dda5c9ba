"""Proactive-service control toolkit.

Exact intelligence bounds for budget-constrained pre-service systems, the
deficit-queue controller that attains them, its learning-aided variant, and
a reproducible simulation and experiment harness.
"""

from .errors import (
    ConfigError,
    DegenerateChain,
    InfeasibleBudget,
    InsufficientHorizon,
    ProserveError,
    StateSpaceTooLarge,
    UndefinedEstimate,
)
from .model import (
    ActionSetSpec,
    CostModel,
    DemandChain,
    JointState,
    ResourceModel,
    RewardModel,
    Scenario,
    entropy_rate,
    enumerate_joint_states,
    feasible_actions,
    mean_unit_cost,
    rho_max,
    sample_chain,
    steady_state,
    transition_prob,
)
from .bound import (
    BoundSolution,
    DualParams,
    dual,
    dual_state,
    intelligence_at_max_budget,
    intelligence_bound,
    minimize_dual,
)
from .control import (
    ControllerState,
    Diagnostics,
    Phase,
    cost_differential,
    decide,
    deficit_update,
    diagnostics,
    effective_cost,
    effective_reward,
)
from .learning import (
    Estimates,
    LearnedMultiplier,
    SampleStream,
    dual_learning,
    estimation_error,
    generate_stream,
    mle_estimate,
)
from .sim import (
    BISC,
    LBISC,
    AlwaysPreserve,
    Metrics,
    NeverPreserve,
    RunTrace,
    convergence_time,
    deficit_steady_level,
    run,
    sliding_convergence_time,
    time_averages,
    write_trace_csv,
)
from .cli import (
    ExperimentConfig,
    SummaryRow,
    parse_config,
    preset_scenario,
    run_experiment,
    single_app_scenario,
    sweep_bound,
    sweep_single_app,
)

__version__ = "0.1.0"
