"""Benchmark harness: experiment configs, comparison runs, CSV and figures.

Experiments are described by an INI-style text config::

    [instance]
    family = sparse_recovery   # simplex_quadratic | sparse_recovery |
    m = 40                     # logistic_sparse | traffic | flow_quadratic |
    n = 100                    # completion | beckmann_file
    sparsity = 8

    [region]
    kind = lifted_l1           # simplex | l1_ball | lifted_l1 | nuclear | dag_flow
    tau = auto                 # number, or auto (planted signal / 2x planted
                               # nuclear norm / 1.0 for plain simplex)

    [run]
    seed = 7
    budget_iters = 400
    cadence = 1
    out = out/exp

    [solver:fw_ls]
    algorithm = fw             # fw | boostfw | afw | dicg | boostdicg
    step_rule = ls             # agnostic | short | ls

    [solver:boostfw]
    algorithm = boostfw
    step_rule = short
    L = auto                   # number, or auto (declared constant, else estimated)
    delta = 1e-3
    max_rounds = 0             # 0 means unbounded

Each solver writes ``<name>.csv`` (schema
``iter,oracle_calls,elapsed_s,f_value,duality_gap,gamma,K_t,step_type,eta``,
floats at 17 significant digits), boosted solvers also write
``<name>_rounds.csv`` and ``<name>_thetas.csv``, and the run renders a
four-panel ``comparison.png`` next to the CSVs.
"""

import configparser
import glob
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .core import OptError, estimate_smoothness
from .objectives import (BeckmannInstance, GenericQuadraticInstance,
                         SquaredDistance, generate_instance, lift_objective,
                         sparse_recovery)
from .pursuit import (PursuitConfig, align, theta_from_alignments,
                      theta_statistics)
from .regions import (DagFlowRegion, DagNetwork, L1Ball, NuclearBall,
                      ScaledSimplex, lift_l1, project_l1)
from .solvers import SolverConfig, StepRule, TraceRow, run

TRACE_HEADER = "iter,oracle_calls,elapsed_s,f_value,duality_gap,gamma,K_t,step_type,eta"
ROUNDS_HEADER = "iter,round,lambda,kind,align_after,residual_norm,backward_factor"
THETA_HEADER = "k,mean,std,count,excluded"


class ConfigError(OptError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Parsed experiment description (instance, region, run, solver specs)."""

    instance: dict
    region: dict
    run: dict
    solvers: dict


@dataclass
class ComparisonReport:
    """Results of one experiment: traces, failures, and emitted files."""

    traces: dict
    failed: dict
    thetas: dict
    csv_paths: dict
    rounds_paths: dict = field(default_factory=dict)
    theta_paths: dict = field(default_factory=dict)
    figure_path: str = None
    out_dir: str = "."


def _coerce(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _to_bool(text, key):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError("%s must be a boolean, got %r" % (key, text))


def parse_config(text):
    """Parse the INI experiment grammar into an ExperimentConfig."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("malformed config: %s" % exc)
    for section in ("instance", "region"):
        if not cp.has_section(section):
            raise ConfigError("config needs an [%s] section" % section)
    instance = {key: _coerce(val) for key, val in cp.items("instance")}
    region = {key: _coerce(val) for key, val in cp.items("region")}

    run_spec = dict(cp.items("run")) if cp.has_section("run") else {}
    budget_seconds = run_spec.pop("budget_seconds", None)
    stop_dual_gap = run_spec.pop("stop_dual_gap", None)
    run_conf = {
        "seed": int(run_spec.pop("seed", 0)),
        "budget_iters": int(run_spec.pop("budget_iters", 100)),
        "budget_seconds": None if budget_seconds is None else float(budget_seconds),
        "cadence": int(run_spec.pop("cadence", 1)),
        "out": str(run_spec.pop("out", "out")),
        "stop_dual_gap": None if stop_dual_gap is None else float(stop_dual_gap),
    }
    if run_spec:
        raise ConfigError("unknown [run] keys: %s" % ", ".join(sorted(run_spec)))

    solvers = {}
    for section in cp.sections():
        if not section.startswith("solver:"):
            if section in ("instance", "region", "run"):
                continue
            raise ConfigError("unknown section [%s]" % section)
        name = section.split(":", 1)[1].strip()
        if not name:
            raise ConfigError("solver section needs a name after the colon")
        if name in solvers:
            raise ConfigError("duplicate solver name %r" % name)
        solvers[name] = dict(cp.items(section))
    if not solvers:
        raise ConfigError("config needs at least one [solver:<name>] section")
    return ExperimentConfig(instance, region, run_conf, solvers)


def load_config(path):
    """Read and parse a config file; missing files are configuration errors."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    return parse_config(text)


def apply_overrides(cfg, seed=None, out=None, budget_iters=None,
                    budget_seconds=None, delta=None, max_rounds=None,
                    step_rule=None):
    """Apply CLI flag overrides onto a parsed config (in place)."""
    if seed is not None:
        cfg.run["seed"] = int(seed)
    if out is not None:
        cfg.run["out"] = str(out)
    if budget_iters is not None:
        cfg.run["budget_iters"] = int(budget_iters)
    if budget_seconds is not None:
        cfg.run["budget_seconds"] = float(budget_seconds)
    for spec in cfg.solvers.values():
        if delta is not None:
            spec["delta"] = repr(float(delta))
        if max_rounds is not None:
            spec["max_rounds"] = str(int(max_rounds))
        if step_rule is not None:
            spec["step_rule"] = str(step_rule)
    return cfg


def _nuclear_norm(matrix):
    return float(np.linalg.svd(matrix, compute_uv=False).sum())


def build_problem(cfg):
    """Instantiate (objective, region, meta) from a parsed config."""
    params = dict(cfg.instance)
    family = params.pop("family", None)
    if family is None:
        raise ConfigError("[instance] needs a family key")
    seed = int(params.pop("seed", cfg.run["seed"]))

    region_spec = dict(cfg.region)
    kind = region_spec.pop("kind", None)
    if kind is None:
        raise ConfigError("[region] needs a kind key")
    tau_raw = region_spec.pop("tau", "auto")
    power_tol = float(region_spec.pop("power_tol", 1e-9))
    if region_spec:
        raise ConfigError("unknown [region] keys: %s" % ", ".join(sorted(region_spec)))

    meta = {"family": family, "seed": seed}
    if family == "simplex_quadratic":
        if kind != "simplex":
            raise ConfigError("simplex_quadratic runs on the simplex region")
        try:
            n = int(params.pop("n"))
        except KeyError:
            raise ConfigError("simplex_quadratic needs n")
        scale = float(params.pop("scale", 1.0))
        center_kind = str(params.pop("center", "barycenter"))
        if params:
            raise ConfigError("unknown [instance] keys: %s" % ", ".join(sorted(params)))
        if center_kind == "barycenter":
            center = np.full(n, 1.0 / n)
        elif center_kind == "origin":
            center = np.zeros(n)
        else:
            raise ConfigError("center must be barycenter or origin")
        obj = SquaredDistance(center, scale=scale)
        tau = 1.0 if tau_raw == "auto" else float(tau_raw)
        return obj, ScaledSimplex(n, tau), meta

    if family == "beckmann_file":
        if kind != "dag_flow":
            raise ConfigError("beckmann_file runs on the dag_flow region")
        path = params.pop("network", None)
        if path is None:
            raise ConfigError("beckmann_file needs a network file path")
        if params:
            raise ConfigError("unknown [instance] keys: %s" % ", ".join(sorted(params)))
        try:
            network = DagNetwork.load(str(path))
        except OSError as exc:
            raise ConfigError("cannot read network %s: %s" % (path, exc))
        if tau_raw != "auto":
            raise ConfigError("dag_flow regions take no tau")
        meta["network"] = network
        return BeckmannInstance(network), DagFlowRegion(network), meta

    try:
        produced = generate_instance(family, seed=seed, **params)
    except TypeError as exc:
        raise ConfigError("bad parameters for family %s: %s" % (family, exc))

    if family in ("sparse_recovery", "logistic_sparse"):
        inner, x_star, tau_auto = produced
        meta["x_star"] = x_star
        tau = tau_auto if tau_raw == "auto" else float(tau_raw)
        n = x_star.size
        if kind == "lifted_l1":
            return lift_objective(inner), ScaledSimplex(2 * n, tau), meta
        if kind == "l1_ball":
            return inner, L1Ball(n, tau), meta
        raise ConfigError("%s supports regions lifted_l1 and l1_ball" % family)

    if family in ("traffic", "flow_quadratic"):
        if kind != "dag_flow":
            raise ConfigError("%s runs on the dag_flow region" % family)
        if tau_raw != "auto":
            raise ConfigError("dag_flow regions take no tau")
        if family == "traffic":
            obj, network = produced
        else:
            obj, network, x_ref = produced
            meta["x_ref"] = x_ref
        meta["network"] = network
        return obj, DagFlowRegion(network), meta

    if family == "completion":
        if kind != "nuclear":
            raise ConfigError("completion runs on the nuclear region")
        obj, planted = produced
        meta["planted"] = planted
        tau = 2.0 * _nuclear_norm(planted) if tau_raw == "auto" else float(tau_raw)
        shape = obj.shape
        return obj, NuclearBall(shape[0], shape[1], tau, power_tol=power_tol), meta

    raise ConfigError("family %s has no region wiring" % family)


_BOOSTED = ("boostfw", "boostdicg")


def build_solver_config(name, spec, obj, region, run_conf, l_cache=None):
    """Turn one [solver:<name>] spec into a SolverConfig."""
    spec = dict(spec)
    algorithm = str(spec.pop("algorithm", "")).strip()
    if not algorithm:
        raise ConfigError("solver %s needs an algorithm" % name)
    rule_name = str(spec.pop("step_rule", "agnostic")).strip()
    l_raw = spec.pop("L", None)
    delta = float(spec.pop("delta", 1e-3))
    max_rounds = int(spec.pop("max_rounds", 0))
    adjustment = _to_bool(spec.pop("worst_case_adjustment", "false"),
                          "worst_case_adjustment")
    if spec:
        raise ConfigError("unknown keys for solver %s: %s"
                          % (name, ", ".join(sorted(spec))))

    if rule_name == "agnostic":
        rule = StepRule("agnostic")
    elif rule_name == "short":
        if l_raw is None or str(l_raw) == "auto":
            if obj.smoothness_L is not None:
                L = float(obj.smoothness_L)
            else:
                if l_cache is None:
                    l_cache = {}
                if "estimated" not in l_cache:
                    l_cache["estimated"] = estimate_smoothness(
                        obj, region, num_pairs=1000, seed=run_conf["seed"]).L_hat
                L = l_cache["estimated"]
        else:
            L = float(l_raw)
        rule = StepRule("short_step", L=L)
    elif rule_name == "ls":
        if obj.is_quadratic:
            rule = StepRule("line_search_exact_quadratic")
        else:
            rule = StepRule("line_search_golden")
    else:
        raise ConfigError("step_rule must be agnostic, short, or ls (solver %s)" % name)

    pursuit = None
    if algorithm in _BOOSTED:
        pursuit = PursuitConfig(delta=delta,
                                max_rounds_K=max_rounds if max_rounds > 0 else None)
    try:
        return SolverConfig(algorithm=algorithm, step_rule=rule, pursuit=pursuit,
                            budget_iters=run_conf["budget_iters"],
                            budget_wall_seconds=run_conf["budget_seconds"],
                            worst_case_adjustment=adjustment,
                            seed=run_conf["seed"],
                            stop_dual_gap=run_conf["stop_dual_gap"],
                            cadence=run_conf["cadence"])
    except OptError as exc:
        raise ConfigError("solver %s: %s" % (name, exc))


def _validate_solver_region(name, solver_cfg, region):
    if solver_cfg.algorithm == "afw" and not getattr(region, "supports_away", False):
        raise ConfigError("solver %s: region does not support away steps" % name)
    if solver_cfg.algorithm in ("dicg", "boostdicg") and \
            not getattr(region, "supports_dicg", False):
        raise ConfigError("solver %s: region does not support "
                          "decomposition-invariant steps" % name)


def _fmt(value):
    return "%.17g" % value


def emit_csv(trace, path):
    """Write the per-iteration trace rows as CSV (17 significant digits)."""
    if not trace.rows:
        raise OptError("refusing to write an empty trace to %s" % path)
    lines = [TRACE_HEADER]
    for r in trace.rows:
        lines.append(",".join([str(r.iter), str(r.oracle_calls), _fmt(r.elapsed_s),
                               _fmt(r.f_value), _fmt(r.duality_gap), _fmt(r.gamma),
                               str(r.K_t), r.step_type, _fmt(r.eta)]))
    _write_lines(path, lines)


def read_trace_csv(path):
    """Parse a trace CSV back into TraceRow records."""
    lines = _read_lines(path)
    if not lines or lines[0] != TRACE_HEADER:
        raise OptError("unexpected trace header in %s" % path)
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 9:
            raise OptError("malformed trace row in %s: %r" % (path, line))
        rows.append(TraceRow(int(parts[0]), int(parts[1]), float(parts[2]),
                             float(parts[3]), float(parts[4]), float(parts[5]),
                             int(parts[6]), parts[7], float(parts[8])))
    return rows


def emit_rounds_csv(outcomes, path):
    """Write per-iteration pursuit round traces as CSV."""
    lines = [ROUNDS_HEADER]
    for t, outcome in enumerate(outcomes):
        for r in outcome.round_trace:
            back = "" if r.backward_factor is None else _fmt(r.backward_factor)
            lines.append(",".join([str(t), str(r.round), _fmt(r.lam), r.kind,
                                   _fmt(r.align_after), _fmt(r.residual_norm), back]))
    _write_lines(path, lines)


def read_rounds_csv(path):
    """Parse a rounds CSV into (iter, round, lam, kind, align, residual, back)."""
    lines = _read_lines(path)
    if not lines or lines[0] != ROUNDS_HEADER:
        raise OptError("unexpected rounds header in %s" % path)
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 7:
            raise OptError("malformed rounds row in %s: %r" % (path, line))
        back = None if parts[6] == "" else float(parts[6])
        rows.append((int(parts[0]), int(parts[1]), float(parts[2]), parts[3],
                     float(parts[4]), float(parts[5]), back))
    return rows


def emit_theta_csv(theta_rows, path):
    """Write the per-round relative alignment-gain table as CSV."""
    lines = [THETA_HEADER]
    for row in theta_rows:
        lines.append(",".join([str(row.k), _fmt(row.mean), _fmt(row.std),
                               str(row.count), str(row.excluded)]))
    _write_lines(path, lines)


def _write_lines(path, lines):
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OptError("failed writing %s: %s" % (path, exc))


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            return handle.read().splitlines()
    except OSError as exc:
        raise OptError("failed reading %s: %s" % (path, exc))


def _render_figure(traces, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 2, figsize=(11.0, 8.0))
    for name in sorted(traces):
        rows = traces[name].rows
        iters = [r.iter for r in rows]
        calls = [r.oracle_calls for r in rows]
        elapsed = [r.elapsed_s for r in rows]
        values = [r.f_value for r in rows]
        gaps = [r.duality_gap if r.duality_gap > 0 else math.nan for r in rows]
        axes[0, 0].plot(iters, values, label=name)
        axes[0, 1].plot(calls, values, label=name)
        axes[1, 0].semilogy(iters, gaps, label=name)
        axes[1, 1].semilogy(elapsed, gaps, label=name)
    axes[0, 0].set(xlabel="iteration", ylabel="f")
    axes[0, 1].set(xlabel="oracle calls", ylabel="f")
    axes[1, 0].set(xlabel="iteration", ylabel="duality gap")
    axes[1, 1].set(xlabel="elapsed seconds", ylabel="duality gap")
    for ax in axes.flat:
        ax.grid(True, alpha=0.3)
    axes[0, 0].legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def run_experiment(cfg):
    """Build the problem once, run every solver from the shared start.

    Solver/region incompatibilities fail before any run; a runtime error in
    one solver marks it failed while the others proceed.  Writes one trace
    CSV per solver (plus rounds and theta CSVs for boosted solvers), a
    four-panel comparison figure, and a plain-text summary.
    """
    obj, region, meta = build_problem(cfg)
    l_cache = {}
    solver_cfgs = {}
    for name, spec in cfg.solvers.items():
        solver_cfgs[name] = build_solver_config(name, spec, obj, region,
                                                cfg.run, l_cache)
        _validate_solver_region(name, solver_cfgs[name], region)

    out_dir = cfg.run["out"]
    os.makedirs(out_dir, exist_ok=True)
    traces, failed, thetas = {}, {}, {}
    csv_paths, rounds_paths, theta_paths = {}, {}, {}
    for name, solver_cfg in solver_cfgs.items():
        try:
            trace = run(obj, region, solver_cfg)
        except OptError as exc:
            failed[name] = str(exc)
            continue
        traces[name] = trace
        if trace.rows:
            csv_paths[name] = os.path.join(out_dir, "%s.csv" % name)
            emit_csv(trace, csv_paths[name])
        if trace.pursuit_outcomes is not None:
            rounds_paths[name] = os.path.join(out_dir, "%s_rounds.csv" % name)
            emit_rounds_csv(trace.pursuit_outcomes, rounds_paths[name])
            thetas[name] = theta_statistics(trace.pursuit_outcomes)
            theta_paths[name] = os.path.join(out_dir, "%s_thetas.csv" % name)
            emit_theta_csv(thetas[name], theta_paths[name])

    figure_path = None
    plottable = {name: t for name, t in traces.items() if t.rows}
    if plottable:
        figure_path = os.path.join(out_dir, "comparison.png")
        _render_figure(plottable, figure_path)

    summary = ["experiment summary", "=================="]
    for name in cfg.solvers:
        if name in failed:
            summary.append("%s: FAILED (%s)" % (name, failed[name]))
        else:
            t = traces[name]
            summary.append("%s: status=%s f=%.17g gap=%.17g oracle_calls=%d rows=%d"
                           % (name, t.status, t.final_f, t.final_gap,
                              t.total_oracle_calls, len(t.rows)))
    _write_lines(os.path.join(out_dir, "report.txt"), summary)

    return ComparisonReport(traces, failed, thetas, csv_paths, rounds_paths,
                            theta_paths, figure_path, out_dir)


def thetas_from_dir(trace_dir):
    """Recompute theta tables from every *_rounds.csv under trace_dir."""
    paths = sorted(glob.glob(os.path.join(trace_dir, "*_rounds.csv")))
    if not paths:
        raise ConfigError("no *_rounds.csv files under %s" % trace_dir)
    tables = {}
    for path in paths:
        name = os.path.basename(path)[:-len("_rounds.csv")]
        grouped = {}
        for it, _rnd, _lam, _kind, align_after, _res, _back in read_rounds_csv(path):
            grouped.setdefault(it, []).append(align_after)
        sequences = [grouped[it] for it in sorted(grouped)]
        rows = theta_from_alignments(sequences)
        tables[name] = rows
        emit_theta_csv(rows, os.path.join(trace_dir, "%s_thetas.csv" % name))
    return tables


def _suite_lower_bound():
    """f(x) * (oracle_calls + 1) >= 1 on min ||x||^2 over the unit simplex."""
    n = 1000
    obj = SquaredDistance(np.zeros(n))
    region = ScaledSimplex(n, 1.0)
    worst = math.inf
    for algorithm in ("fw", "boostfw"):
        pursuit = PursuitConfig() if algorithm == "boostfw" else None
        cfg = SolverConfig(algorithm=algorithm,
                           step_rule=StepRule("line_search_exact_quadratic"),
                           pursuit=pursuit, budget_iters=300)
        trace = run(obj, region, cfg)
        for row in trace.rows:
            product = row.f_value * (row.oracle_calls + 1)
            if product < worst:
                worst = product
            if product < 1.0 - 1e-9:
                return False, ("%s row %d: f*(calls+1) = %.17g < 1"
                               % (algorithm, row.iter, product))
        if trace.final_f < 1e-3:
            return False, ("%s final f = %.17g below the optimal value 1/n"
                           % (algorithm, trace.final_f))
    return True, "min f*(oracle_calls+1) = %.12f over fw and boostfw" % worst


def _suite_fact2_roundtrip():
    """Sign-split lift: exact round-trip and simplex feasibility, 1000 points."""
    rng = np.random.default_rng(0)
    n = 37
    for trial in range(1000):
        x = rng.standard_normal(n) * (10.0 ** rng.integers(-3, 4))
        l1 = float(np.abs(x).sum())
        if l1 == 0.0:
            continue
        tau = l1 if trial % 5 == 0 else l1 * rng.uniform(1.0, 2.0)
        z = lift_l1(x, tau)
        if not np.array_equal(project_l1(z), x):
            return False, "trial %d: round-trip not exact" % trial
        if not ScaledSimplex(2 * n, tau).contains(z, 1e-12):
            return False, "trial %d: lift outside the scaled simplex" % trial
    return True, "1000 lift/project round-trips exact and feasible"


def _suite_pursuit_invariants():
    """Pursuit guarantees over a 200-iteration boosted run on a quadratic."""
    rng = np.random.default_rng(3)
    n = 50
    B = rng.standard_normal((n, n))
    A = B.T @ B / n + np.eye(n)
    target = rng.dirichlet(np.ones(n))
    obj = GenericQuadraticInstance(A, -(A @ target))
    region = ScaledSimplex(n, 1.0)
    cfg = SolverConfig(algorithm="boostfw",
                       step_rule=StepRule("short_step", L=obj.smoothness_L),
                       pursuit=PursuitConfig(), budget_iters=200)
    trace = run(obj, region, cfg)
    delta = cfg.pursuit.delta
    for i, row in enumerate(trace.rows):
        x_t = trace.iterates[i]
        outcome = trace.pursuit_outcomes[i]
        if not region.contains(x_t, 1e-9):
            return False, "iterate %d infeasible" % row.iter
        residuals = [r.residual_norm for r in outcome.round_trace]
        for j, r in enumerate(outcome.round_trace):
            if r.lam < -1e-12:
                return False, "iter %d round %d: lambda = %.3g" % (row.iter, j, r.lam)
            if r.backward_factor is not None and r.backward_factor < 0.5 - 1e-12:
                return False, ("iter %d round %d: backward factor %.17g"
                               % (row.iter, j, r.backward_factor))
            if j > 0 and residuals[j] > residuals[j - 1] * (1.0 + 1e-12):
                return False, "iter %d: residual norms increased" % row.iter
        base = align(-np.asarray(obj.grad(x_t)), outcome.v0.point - x_t)
        if row.eta < base + (row.K_t - 1) * delta - 1e-9:
            return False, ("iter %d: eta %.17g below the alignment ladder %.17g"
                           % (row.iter, row.eta, base + (row.K_t - 1) * delta))
    return True, "%d iterations satisfy the pursuit guarantees" % len(trace.rows)


def _enumerate_paths(network, origin, dest):
    paths = []

    def walk(node, acc):
        if node == dest:
            paths.append(list(acc))
            return
        for head, link_id in network.out_links[node]:
            acc.append(link_id)
            walk(head, acc)
            acc.pop()

    walk(origin, [])
    return paths


def _suite_oracle_optimality():
    """Oracle outputs attain the exact minimum of <c, .> over each region."""
    rng = np.random.default_rng(5)
    n = 23
    simplex = ScaledSimplex(n, 2.5)
    ball = L1Ball(n, 1.75)
    for trial in range(200):
        c = rng.standard_normal(n)
        v = simplex.lmo(c).point
        want = 2.5 * float(c.min())
        if abs(float(np.dot(c, v)) - want) > 1e-12 * max(1.0, abs(want)):
            return False, "simplex trial %d: oracle value off" % trial
        v = ball.lmo(c).point
        want = -1.75 * float(np.abs(c).max())
        if abs(float(np.dot(c, v)) - want) > 1e-12 * max(1.0, abs(want)):
            return False, "l1 trial %d: oracle value off" % trial
    nuclear = NuclearBall(6, 5, 3.0)
    for trial in range(20):
        C = rng.standard_normal((6, 5))
        v = nuclear.lmo(C.reshape(-1)).point
        top = float(np.linalg.svd(C, compute_uv=False)[0])
        if float(np.dot(C.reshape(-1), v)) > -3.0 * top * (1.0 - 1e-6):
            return False, "nuclear trial %d: oracle value off" % trial
    network = DagNetwork(6, [(0, 0, 2, 1.0, 1.0), (1, 0, 3, 1.0, 1.0),
                             (2, 1, 2, 1.0, 1.0), (3, 1, 3, 1.0, 1.0),
                             (4, 2, 4, 1.0, 1.0), (5, 2, 5, 1.0, 1.0),
                             (6, 3, 4, 1.0, 1.0), (7, 3, 5, 1.0, 1.0)],
                         [(0, 4, 1.0), (1, 5, 2.0)])
    region = DagFlowRegion(network)
    for trial in range(20):
        costs = rng.uniform(0.1, 5.0, network.num_links)
        flow = region.lmo(costs).point
        total = float(np.dot(costs, flow))
        want = 0.0
        for origin, dest, amount in network.demands:
            best = min(sum(costs[l] for l in p)
                       for p in _enumerate_paths(network, origin, dest))
            want += amount * best
        if abs(total - want) > 1e-9 * max(1.0, abs(want)):
            return False, "dag trial %d: oracle value %.17g, brute force %.17g" \
                % (trial, total, want)
    return True, "simplex, l1, nuclear, and dag oracles attain the exact minimum"


def _suite_smoothness():
    """Smoothness estimates recover quadratic constants and stay below bounds."""
    rng = np.random.default_rng(9)
    center = rng.standard_normal(40)
    obj = SquaredDistance(center, scale=1.7)
    est = estimate_smoothness(obj, ScaledSimplex(40, 1.0), num_pairs=500, seed=1)
    if abs(est.L_hat - 3.4) > 1e-9 * 3.4:
        return False, "quadratic estimate %.17g, exact constant 3.4" % est.L_hat
    inner, _x_star, tau = sparse_recovery(20, 50, 5, seed=7)
    est = estimate_smoothness(inner, L1Ball(50, tau), num_pairs=500, seed=2)
    if est.L_hat > inner.smoothness_L * (1.0 + 1e-12):
        return False, ("least-squares estimate %.17g above declared %.17g"
                       % (est.L_hat, inner.smoothness_L))
    return True, "estimates match the quadratic constant and respect declared bounds"


_SUITES = {
    "lower_bound": _suite_lower_bound,
    "fact2_roundtrip": _suite_fact2_roundtrip,
    "pursuit_invariants": _suite_pursuit_invariants,
    "oracle_optimality": _suite_oracle_optimality,
    "smoothness": _suite_smoothness,
}


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def verify_suite(names):
    """Run named invariant suites; unknown names are configuration errors."""
    for name in names:
        if name not in _SUITES:
            raise ConfigError("unknown suite %r (have: %s)"
                              % (name, ", ".join(sorted(_SUITES))))
    results = []
    for name in names:
        passed, detail = _SUITES[name]()
        results.append(SuiteResult(name, passed, detail))
    return results


def available_suites():
    return sorted(_SUITES)
