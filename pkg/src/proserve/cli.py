"""Experiment harness: configs, policy comparisons, and parameter sweeps.

Subcommands:

* ``bound``      -- sweep the exact intelligence bound over a budget grid
* ``single-app`` -- single-application sweeps of the bound and entropy rate
* ``simulate``   -- run one (policy, V, f) cell and export its trace
* ``compare``    -- run the full policy/V/f grid and write ``summary.csv``

Configs are TOML (schema documented in the README); two presets hard-code
the reference three-application settings. Exit codes: 0 success, 1
validation error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import math
import sys
import warnings
from dataclasses import dataclass, replace

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python 3.10
    import tomli as _toml

from . import sim
from .bound import intelligence_bound
from .errors import ConfigError, InfeasibleBudget, ProserveError
from .model import (
    ActionSetSpec,
    CostModel,
    DemandChain,
    ResourceModel,
    RewardModel,
    Scenario,
    entropy_rate,
)

SUMMARY_COLUMNS = (
    "policy,V,f,seed_count,r_av_mean,r_av_se,c_av_mean,c_av_se,"
    "d_bar_mean,d_bar_se,t_conv_mean,t_conv_se,oracle_I"
)

POLICY_NAMES = ("BISC", "LBISC", "AlwaysPreserve", "NeverPreserve")

PRESETS = ("paper-setting-A", "paper-setting-B")


def preset_scenario(name: str, rho: float | None = None) -> Scenario:
    """Three-application reference settings used throughout the test plan."""
    if name == "paper-setting-A":
        eps = (0.6, 0.5, 0.3)
        dlt = (0.2, 0.6, 0.5)
        r_pre = (3.0, 5.0, 8.0)
        p_low = (0.5, 0.3, 0.3)
    elif name == "paper-setting-B":
        eps = (0.8, 0.4, 0.3)
        dlt = (0.2, 0.9, 0.5)
        r_pre = (4.0, 5.0, 3.0)
        p_low = (0.5, 0.8, 0.3)
    else:
        raise ConfigError(f"unknown preset '{name}' (key 'preset')")
    resources = ResourceModel.product_form(
        values=[(1.0, 2.0)] * 3, probs=[(p, 1.0 - p) for p in p_low]
    )
    return Scenario(
        chains=tuple(DemandChain(e, d) for e, d in zip(eps, dlt)),
        resources=resources,
        costs=CostModel.from_resource_values(resources),
        rewards=RewardModel(np.array(r_pre), np.ones(3)),
        actions=ActionSetSpec.unconstrained(),
        rho=3.5 if rho is None else rho,
    )


def single_app_scenario(
    epsilon: float, delta: float, rho: float | None = None
) -> Scenario:
    """Prediction-rate template for single-application sweeps.

    One resource state with unit cost 1, reward 1 for a correct pre-service
    and 0 for passive service; the default budget is 0.7 * rho_max, which
    keeps every chain on the sweep grids feasible (half the maximum budget
    coincides with the passive cost floor of symmetric chains and would
    degenerate the sweep).
    """
    resources = ResourceModel(states=np.array([[1.0]]), probs=np.array([1.0]))
    return Scenario(
        chains=(DemandChain(epsilon, delta),),
        resources=resources,
        costs=CostModel.from_resource_values(resources),
        rewards=RewardModel(np.array([1.0]), np.array([0.0])),
        actions=ActionSetSpec.unconstrained(),
        rho=0.7 if rho is None else rho,
    )


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    scenario: Scenario
    policies: tuple[str, ...]
    V_list: tuple[float, ...]
    f_list: tuple[int, ...]
    rho_grid: tuple[float, ...]
    horizon: int
    seeds: int
    learning_T: int | None   # None = ceil(V^(2/3))
    zeta: float | None       # None = heuristic from V and N(T)
    include_learning: bool
    independent_trajectories: bool
    seed: int


@dataclass(frozen=True)
class SummaryRow:
    policy: str
    V: float
    f: int
    seed_count: int
    r_av_mean: float
    r_av_se: float
    c_av_mean: float
    c_av_se: float
    d_bar_mean: float
    d_bar_se: float
    t_conv_mean: float
    t_conv_se: float
    oracle_I: float


def _check_keys(table: dict, allowed: set[str], section: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in [{section}]")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _float_list(value, key: str) -> tuple[float, ...]:
    _require(
        isinstance(value, list) and len(value) > 0,
        f"key '{key}' must be a nonempty list",
    )
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"key '{key}' must hold numbers") from None


def _build_scenario(table: dict) -> Scenario:
    allowed = {
        "preset",
        "rho",
        "epsilon",
        "delta",
        "r_pre",
        "r_cur",
        "resources",
        "costs",
        "actions",
    }
    _check_keys(table, allowed, "scenario")
    rho = table.get("rho")
    if rho is not None:
        _require(isinstance(rho, (int, float)), "key 'rho' must be a number")
        _require(rho > 0, f"key 'rho' must be positive, got {rho}")
    if "preset" in table:
        extra = set(table) - {"preset", "rho"}
        _require(
            not extra,
            f"preset scenarios accept only a 'rho' override; remove keys {sorted(extra)}",
        )
        return preset_scenario(table["preset"], rho=rho)
    for key in ("epsilon", "delta", "r_pre", "r_cur", "resources"):
        _require(key in table, f"missing required scenario key '{key}'")
    _require(rho is not None, "missing required scenario key 'rho'")
    eps = _float_list(table["epsilon"], "epsilon")
    dlt = _float_list(table["delta"], "delta")
    r_pre = _float_list(table["r_pre"], "r_pre")
    r_cur = _float_list(table["r_cur"], "r_cur")
    m = len(eps)
    for key, vals in (("delta", dlt), ("r_pre", r_pre), ("r_cur", r_cur)):
        _require(len(vals) == m, f"key '{key}' must list one value per application")
    res_table = table["resources"]
    _check_keys(res_table, {"values", "probs", "states", "state_probs"}, "scenario.resources")
    if "values" in res_table:
        _require("probs" in res_table, "missing key 'probs' in [scenario.resources]")
        resources = ResourceModel.product_form(res_table["values"], res_table["probs"])
    else:
        _require(
            "states" in res_table and "state_probs" in res_table,
            "resources need either 'values'/'probs' or 'states'/'state_probs'",
        )
        resources = ResourceModel(
            np.asarray(res_table["states"], dtype=float),
            np.asarray(res_table["state_probs"], dtype=float),
        )
    if "costs" in table:
        cost_table = table["costs"]
        _check_keys(cost_table, {"table"}, "scenario.costs")
        _require("table" in cost_table, "missing key 'table' in [scenario.costs]")
        costs = CostModel(np.asarray(cost_table["table"], dtype=float))
    else:
        costs = CostModel.from_resource_values(resources)
    if "actions" in table:
        act_table = table["actions"]
        _check_keys(act_table, {"kind", "caps"}, "scenario.actions")
        kind = act_table.get("kind", "unconstrained")
        if kind == "unconstrained":
            actions = ActionSetSpec.unconstrained()
        elif kind == "cardinality":
            _require("caps" in act_table, "missing key 'caps' in [scenario.actions]")
            actions = ActionSetSpec.cardinality(act_table["caps"])
        else:
            raise ConfigError(f"key 'kind' must be 'unconstrained' or 'cardinality'")
    else:
        actions = ActionSetSpec.unconstrained()
    try:
        return Scenario(
            chains=tuple(DemandChain(e, d) for e, d in zip(eps, dlt)),
            resources=resources,
            costs=costs,
            rewards=RewardModel(np.asarray(r_pre), np.asarray(r_cur)),
            actions=actions,
            rho=float(rho),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML experiment config.

    Malformed TOML reports the first error with its line number; validation
    failures name the offending key.
    """
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    _check_keys(data, {"scenario", "experiment"}, "top level")
    _require("scenario" in data, "missing required [scenario] section")
    scenario = _build_scenario(data["scenario"])
    exp = data.get("experiment", {})
    allowed = {
        "policies",
        "V",
        "f",
        "horizon",
        "seeds",
        "learning_T",
        "zeta",
        "include_learning",
        "independent_trajectories",
        "seed",
        "rho_grid",
    }
    _check_keys(exp, allowed, "experiment")
    policies = exp.get("policies", ["BISC"])
    _require(
        isinstance(policies, list) and len(policies) > 0,
        "key 'policies' must be a nonempty list",
    )
    for p in policies:
        _require(p in POLICY_NAMES, f"key 'policies' lists unknown policy '{p}'")
    v_list = _float_list(exp.get("V", [100.0]), "V")
    for v in v_list:
        _require(v >= 1.0, f"key 'V' entries must be >= 1, got {v}")
    f_raw = exp.get("f", [1])
    _require(
        isinstance(f_raw, list) and len(f_raw) > 0, "key 'f' must be a nonempty list"
    )
    f_list = []
    for v in f_raw:
        _require(isinstance(v, int) and v >= 1, f"key 'f' entries must be ints >= 1")
        f_list.append(v)
    horizon = exp.get("horizon", 100_000)
    _require(isinstance(horizon, int) and horizon >= 1, "key 'horizon' must be an int >= 1")
    seeds = exp.get("seeds", 10)
    _require(isinstance(seeds, int) and seeds >= 1, "key 'seeds' must be an int >= 1")
    learning_t = exp.get("learning_T", "auto")
    if learning_t == "auto":
        learning_t = None
    else:
        _require(
            isinstance(learning_t, int) and learning_t >= 1,
            "key 'learning_T' must be 'auto' or an int >= 1",
        )
    zeta = exp.get("zeta", "auto")
    if zeta == "auto":
        zeta = None
    else:
        _require(
            isinstance(zeta, (int, float)) and zeta > 0,
            "key 'zeta' must be 'auto' or a positive number",
        )
        zeta = float(zeta)
    include_learning = exp.get("include_learning", False)
    _require(isinstance(include_learning, bool), "key 'include_learning' must be a bool")
    independent = exp.get("independent_trajectories", False)
    _require(
        isinstance(independent, bool), "key 'independent_trajectories' must be a bool"
    )
    seed = exp.get("seed", 12345)
    _require(isinstance(seed, int), "key 'seed' must be an int")
    rho_grid = exp.get("rho_grid", [])
    if isinstance(rho_grid, dict):
        _check_keys(rho_grid, {"start", "stop", "step"}, "experiment.rho_grid")
        try:
            start, stop, step = (
                float(rho_grid["start"]),
                float(rho_grid["stop"]),
                float(rho_grid["step"]),
            )
        except KeyError as exc:
            raise ConfigError(f"missing key '{exc.args[0]}' in 'rho_grid'") from None
        _require(step > 0 and stop >= start, "key 'rho_grid' needs step > 0, stop >= start")
        grid = tuple(np.arange(start, stop + step / 2, step).tolist())
    else:
        grid = _float_list(rho_grid, "rho_grid") if rho_grid else ()
    for r in grid:
        _require(r > 0, f"key 'rho_grid' entries must be positive, got {r}")
    return ExperimentConfig(
        scenario=scenario,
        policies=tuple(policies),
        V_list=v_list,
        f_list=tuple(f_list),
        rho_grid=grid,
        horizon=horizon,
        seeds=seeds,
        learning_T=learning_t,
        zeta=zeta,
        include_learning=include_learning,
        independent_trajectories=independent,
        seed=seed,
    )


def zeta_heuristic(V: float, f: int, learning_T: int | None) -> float:
    """Convergence tolerance scaled like the learned multiplier's error band.

    The learned operating point sits within O(V log(V) / sqrt(N(T))) of the
    true multiplier, so the band must cover that error at a comfortable
    margin plus an O(1) floor for queue granularity.
    """
    T = learning_T or sim.default_learning_T(V)
    return 2.0 * V * math.log10(V) / math.sqrt(f * T) + 2.0


def _policy_instance(name: str, V: float, f: int, cfg: ExperimentConfig):
    if name == "BISC":
        return sim.BISC(V=V)
    if name == "LBISC":
        return sim.LBISC(
            V=V,
            f=f,
            learning_T=cfg.learning_T,
            independent_trajectories=cfg.independent_trajectories,
        )
    if name == "AlwaysPreserve":
        return sim.AlwaysPreserve()
    if name == "NeverPreserve":
        return sim.NeverPreserve()
    raise ConfigError(f"unknown policy '{name}'")


def _mean_se(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        # a never-converged run poisons the cell mean; flag it as such
        return math.inf, math.nan
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, se


def _run_cell(payload) -> SummaryRow:
    cfg, name, V, f, gamma_star, zeta, out_dir, traces = payload
    policy = _policy_instance(name, V, f, cfg)
    r_avs, c_avs, d_bars, t_convs = [], [], [], []
    for rep in range(cfg.seeds):
        trace = sim.run(cfg.scenario, policy, cfg.horizon, seed=(cfg.seed, rep))
        metrics = sim.time_averages(
            trace,
            include_learning=cfg.include_learning,
            gamma_star=gamma_star,
            zeta=zeta,
        )
        r_avs.append(metrics.r_av)
        c_avs.append(metrics.c_av)
        d_bars.append(metrics.d_bar)
        t_convs.append(metrics.t_conv)
        if traces and out_dir is not None:
            sim.write_trace_csv(
                trace, f"{out_dir}/trace_{name}_V{V:g}_f{f}_seed{rep}.csv"
            )
    r_mean, r_se = _mean_se(r_avs)
    c_mean, c_se = _mean_se(c_avs)
    d_mean, d_se = _mean_se(d_bars)
    t_mean, t_se = _mean_se(t_convs)
    return SummaryRow(
        policy=name,
        V=V,
        f=f,
        seed_count=cfg.seeds,
        r_av_mean=r_mean,
        r_av_se=r_se,
        c_av_mean=c_mean,
        c_av_se=c_se,
        d_bar_mean=d_mean,
        d_bar_se=d_se,
        t_conv_mean=t_mean,
        t_conv_se=t_se,
        oracle_I=math.nan,  # filled by the caller
    )


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | None = None,
    traces: bool = False,
    jobs: int = 1,
) -> list[SummaryRow]:
    """Run every (policy, V, f) cell for the configured seeds.

    Rows keep the configured ordering regardless of worker completion order;
    every row carries the exact bound of the scenario. Identical seeds feed
    every cell, so policies are compared under common random numbers.
    """
    solution = intelligence_bound(config.scenario)
    cells = [
        (name, V, f)
        for name in config.policies
        for V in config.V_list
        for f in config.f_list
    ]
    # one tolerance per V across the whole experiment, referenced to the
    # smallest population factor (the largest learning error in the grid)
    f_ref = min(config.f_list)
    payloads = []
    for name, V, f in cells:
        zeta = (
            config.zeta
            if config.zeta is not None
            else zeta_heuristic(V, f_ref, config.learning_T)
        )
        gamma_star = V * solution.multiplier
        payloads.append((config, name, V, f, gamma_star, zeta, out_dir, traces))
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, payloads))
    else:
        rows = [_run_cell(p) for p in payloads]
    rows = [replace(row, oracle_I=solution.value) for row in rows]
    if out_dir is not None:
        write_summary_csv(rows, f"{out_dir}/summary.csv")
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def write_summary_csv(rows: list[SummaryRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_COLUMNS + "\n")
        for r in rows:
            fields = (
                r.policy,
                _fmt(float(r.V)),
                str(r.f),
                str(r.seed_count),
                _fmt(r.r_av_mean),
                _fmt(r.r_av_se),
                _fmt(r.c_av_mean),
                _fmt(r.c_av_se),
                _fmt(r.d_bar_mean),
                _fmt(r.d_bar_se),
                _fmt(r.t_conv_mean),
                _fmt(r.t_conv_se),
                _fmt(r.oracle_I),
            )
            fh.write(",".join(fields) + "\n")


def sweep_bound(scenario: Scenario, rho_grid) -> list[tuple[float, float]]:
    """Exact bound over a budget grid; NaN marks infeasible budgets (below
    the passive-service cost floor no policy exists)."""
    out = []
    for rho in rho_grid:
        with warnings.catch_warnings():
            # grids intentionally cross the (0, rho_max] range
            warnings.simplefilter("ignore")
            variant = replace(scenario, rho=float(rho))
        try:
            value = intelligence_bound(variant).value
        except InfeasibleBudget:
            value = math.nan
        out.append((float(rho), value))
    return out


def sweep_single_app(
    grid,
    mode: str = "symmetric",
    rho: float | None = None,
    delta: float = 0.6,
) -> list[tuple[float, float, float]]:
    """Bound and entropy rate across single-application chains.

    ``symmetric`` sweeps chains with equal transition rates (constant demand
    volume, varying predictability); ``fixed-delta`` holds the ON->OFF rate
    and sweeps the OFF->ON rate, so demand volume and predictability move
    together.
    """
    if mode not in ("symmetric", "fixed-delta"):
        raise ValueError("mode must be 'symmetric' or 'fixed-delta'")
    rows = []
    for eps in grid:
        dlt = eps if mode == "symmetric" else delta
        scenario = single_app_scenario(float(eps), float(dlt), rho=rho)
        try:
            value = intelligence_bound(scenario).value
        except InfeasibleBudget:
            value = math.nan
        rows.append((float(eps), value, entropy_rate(scenario.chains[0])))
    return rows


def _write_bound_csv(points, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("rho,intelligence\n")
        for rho, value in points:
            fh.write(f"{_fmt(rho)},{_fmt(value)}\n")


def _write_single_app_csv(rows, path, mode: str, rho: float, delta: float) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# mode={mode} rho={_fmt(rho)} delta={_fmt(delta)}\n")
        fh.write("epsilon,intelligence,entropy_rate\n")
        for eps, value, entropy in rows:
            fh.write(f"{_fmt(eps)},{_fmt(value)},{_fmt(entropy)}\n")


PLOT_STUB = '''"""Plot {csv} (generated stub; needs matplotlib)."""
import csv

import matplotlib.pyplot as plt

xs, ys = [], []
with open("{csv}", encoding="utf-8") as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        try:
            xs.append(float(row["{x}"]))
            ys.append(float(row["{y}"]))
        except ValueError:
            continue  # nan / inf rows
plt.plot(xs, ys, marker="o")
plt.xlabel("{x}")
plt.ylabel("{y}")
plt.title("{title}")
plt.tight_layout()
plt.savefig("{stem}.png", dpi=150)
print("wrote {stem}.png")
'''


def _write_plot_stub(out_dir: str, csv_name: str, x: str, y: str, title: str) -> None:
    stem = csv_name.rsplit(".", 1)[0]
    with open(f"{out_dir}/plot_{stem}.py", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(PLOT_STUB.format(csv=csv_name, x=x, y=y, title=title, stem=stem))


def _load_config(path: str, seed_override: int | None) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    cfg = parse_config(text)
    if seed_override is not None:
        cfg = replace(cfg, seed=seed_override)
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proserve",
        description="Proactive-service control: bounds, controllers, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="sweep the intelligence bound over budgets")
    p_bound.add_argument("--config", required=True)
    p_bound.add_argument("--grid", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    p_bound.add_argument("--out-dir", default=".")
    p_bound.add_argument("--seed", type=int)

    p_single = sub.add_parser("single-app", help="single-application sweeps")
    p_single.add_argument("--mode", choices=("symmetric", "fixed-delta"), default="symmetric")
    p_single.add_argument("--delta", type=float, default=0.6)
    p_single.add_argument("--rho", type=float)
    p_single.add_argument("--points", type=int, default=17)
    p_single.add_argument("--out-dir", default=".")

    p_simulate = sub.add_parser("simulate", help="run one cell and export its trace")
    p_simulate.add_argument("--config", required=True)
    p_simulate.add_argument("--out-dir", default=".")
    p_simulate.add_argument("--seed", type=int)
    p_simulate.add_argument("--traces", action="store_true", default=True)
    p_simulate.add_argument("--jobs", type=int, default=1)

    p_compare = sub.add_parser("compare", help="run the policy/V/f grid")
    p_compare.add_argument("--config", required=True)
    p_compare.add_argument("--out-dir", default=".")
    p_compare.add_argument("--seed", type=int)
    p_compare.add_argument("--traces", action="store_true")
    p_compare.add_argument("--jobs", type=int, default=1)
    return parser


def _cmd_bound(args) -> int:
    cfg = _load_config(args.config, getattr(args, "seed", None))
    if args.grid is not None:
        start, stop, step = args.grid
        if step <= 0 or stop < start:
            raise ConfigError("--grid needs step > 0 and stop >= start")
        grid = np.arange(start, stop + step / 2, step).tolist()
    elif cfg.rho_grid:
        grid = list(cfg.rho_grid)
    else:
        raise ConfigError("no budget grid: set 'rho_grid' in the config or pass --grid")
    points = sweep_bound(cfg.scenario, grid)
    path = f"{args.out_dir}/bound.csv"
    _write_bound_csv(points, path)
    _write_plot_stub(args.out_dir, "bound.csv", "rho", "intelligence", "intelligence bound vs budget rate")
    print(f"wrote {path} ({len(points)} budgets)")
    return 0


def _cmd_single_app(args) -> int:
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    grid = np.linspace(0.05, 0.95, args.points)
    rho = args.rho if args.rho is not None else 0.7
    rows = sweep_single_app(grid, mode=args.mode, rho=rho, delta=args.delta)
    name = f"single_app_{args.mode}.csv"
    path = f"{args.out_dir}/{name}"
    _write_single_app_csv(rows, path, args.mode, rho, args.delta)
    _write_plot_stub(args.out_dir, name, "epsilon", "intelligence", f"single-application bound ({args.mode})")
    print(f"wrote {path} ({len(rows)} grid points)")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config, args.seed)
    n_cells = len(cfg.policies) * len(cfg.V_list) * len(cfg.f_list)
    if n_cells != 1:
        raise ConfigError(
            "simulate runs exactly one cell; configure single-entry "
            "'policies', 'V' and 'f' (or use compare)"
        )
    rows = run_experiment(cfg, out_dir=args.out_dir, traces=True, jobs=args.jobs)
    print(f"wrote {args.out_dir}/summary.csv and per-seed traces")
    _print_rows(rows)
    return 0


def _cmd_compare(args) -> int:
    cfg = _load_config(args.config, args.seed)
    rows = run_experiment(cfg, out_dir=args.out_dir, traces=args.traces, jobs=args.jobs)
    print(f"wrote {args.out_dir}/summary.csv ({len(rows)} cells)")
    _print_rows(rows)
    return 0


def _print_rows(rows: list[SummaryRow]) -> None:
    print(SUMMARY_COLUMNS)
    for r in rows:
        print(
            f"{r.policy},{_fmt(float(r.V))},{r.f},{r.seed_count},"
            f"{_fmt(r.r_av_mean)},{_fmt(r.r_av_se)},{_fmt(r.c_av_mean)},"
            f"{_fmt(r.c_av_se)},{_fmt(r.d_bar_mean)},{_fmt(r.d_bar_se)},"
            f"{_fmt(r.t_conv_mean)},{_fmt(r.t_conv_se)},{_fmt(r.oracle_I)}"
        )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "bound": _cmd_bound,
        "single-app": _cmd_single_app,
        "simulate": _cmd_simulate,
        "compare": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ProserveError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
