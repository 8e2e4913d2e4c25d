"""Projection-free solver drivers sharing one trace schema.

Every driver starts from the oracle vertex minimizing the gradient at the
origin, runs until an iteration/wall budget or a duality-gap target, and
records one trace row per executed iteration: the state of x_t plus the
step that leaves it.  ``oracle_calls`` on row t counts the calls spent
producing x_t (the shared start vertex counts one); the oracle call that
certifies the duality gap is the iteration's own and is never added.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import OptError
from .pursuit import PursuitConfig, align, gradient_pursuit
from .regions import ActiveSet, away_vertex, dicg_away_vertex

GRAD_NORM_STOP = 1e-14  # gradient norm below which the iterate is critical
DROP_TOL = 1e-12        # relative tolerance classifying away steps as drops
RATIO_TOL = 1e-14       # direction entries below -RATIO_TOL join the ratio test

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class StepRule:
    """Step-size rule: agnostic, short_step, or one of two line searches."""

    kind: str = "agnostic"
    L: float = None
    golden_tol: float = 1e-10
    golden_max_iters: int = 200

    def __post_init__(self):
        kinds = ("agnostic", "short_step", "line_search_exact_quadratic",
                 "line_search_golden")
        if self.kind not in kinds:
            raise OptError("unknown step rule %r" % (self.kind,))
        if self.kind == "short_step" and (self.L is None or self.L <= 0):
            raise OptError("short_step needs a positive smoothness constant L")
        if self.golden_tol <= 0 or self.golden_max_iters < 1:
            raise OptError("golden-section parameters must be positive")


@dataclass
class SolverConfig:
    """Algorithm selection, step rule, budgets, and stopping targets."""

    algorithm: str = "fw"
    step_rule: StepRule = None
    pursuit: PursuitConfig = None
    budget_iters: int = 100
    budget_wall_seconds: float = None
    worst_case_adjustment: bool = False
    seed: int = 0
    stop_dual_gap: float = None
    cadence: int = 1

    def __post_init__(self):
        if self.algorithm not in ("fw", "boostfw", "afw", "dicg", "boostdicg"):
            raise OptError("unknown algorithm %r" % (self.algorithm,))
        if self.step_rule is None:
            self.step_rule = StepRule()
        if int(self.budget_iters) < 1:
            raise OptError("budget_iters must be at least 1")
        self.budget_iters = int(self.budget_iters)
        boosted = self.algorithm in ("boostfw", "boostdicg")
        if boosted and self.pursuit is None:
            raise OptError("%s needs a pursuit configuration" % self.algorithm)
        if not boosted and self.pursuit is not None:
            raise OptError("%s does not take a pursuit configuration" % self.algorithm)
        if self.budget_wall_seconds is not None and self.budget_wall_seconds < 0:
            raise OptError("budget_wall_seconds must be nonnegative")
        if self.stop_dual_gap is not None and self.stop_dual_gap < 0:
            raise OptError("stop_dual_gap must be nonnegative")
        if int(self.cadence) < 1:
            raise OptError("cadence must be at least 1")
        self.cadence = int(self.cadence)


@dataclass
class TraceRow:
    """Per-iteration record: the state of x_t and the step leaving it."""

    iter: int
    oracle_calls: int
    elapsed_s: float
    f_value: float
    duality_gap: float
    gamma: float
    K_t: int
    step_type: str
    eta: float


@dataclass
class RunTrace:
    """Full run record: rows plus the final iterate and summary fields."""

    rows: list
    final_x: np.ndarray
    final_f: float
    final_gap: float
    total_oracle_calls: int
    status: str  # budget | optimal | gap_target | time_budget
    pursuit_outcomes: list = None
    iterates: list = field(default_factory=list)


def step_size(rule, t, neg_grad_dot_dir, dir_norm_sq, upper, f_along=None,
              curvature=None):
    """Step length on [0, upper] for direction d at iteration t.

    ``neg_grad_dot_dir`` is <-grad f(x), d> and ``dir_norm_sq`` is ||d||^2.
    The exact-quadratic search needs ``curvature`` (second derivative along
    d); the golden-section search needs ``f_along`` mapping gamma to
    f(x + gamma d).
    """
    if dir_norm_sq <= 0.0:
        raise OptError("step_size needs a direction with positive norm")
    if upper <= 0.0:
        raise OptError("step_size needs a positive upper bound")
    if rule.kind == "agnostic":
        return min(2.0 / (t + 2.0), upper)
    if rule.kind == "short_step":
        if neg_grad_dot_dir < 0.0:
            raise OptError("short step got a non-descent direction "
                           "(<-grad, d> = %.17g)" % neg_grad_dot_dir)
        return min(neg_grad_dot_dir / (rule.L * dir_norm_sq), upper)
    if rule.kind == "line_search_exact_quadratic":
        if curvature is None:
            raise OptError("exact quadratic line search needs the directional curvature")
        if curvature <= 0.0:
            # the slice is affine: run to whichever end descends
            return upper if neg_grad_dot_dir > 0.0 else 0.0
        return min(max(neg_grad_dot_dir / curvature, 0.0), upper)
    if f_along is None:
        raise OptError("golden-section line search needs the slice f_along")
    return _golden_section(f_along, upper, rule.golden_tol, rule.golden_max_iters)


def _golden_section(f, upper, tol, max_iters):
    a, b = 0.0, float(upper)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    best_x, best_f = (x1, f1) if f1 <= f2 else (x2, f2)
    for _ in range(max_iters):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
            if f1 < best_f:
                best_x, best_f = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
            if f2 < best_f:
                best_x, best_f = x2, f2
    return best_x


def duality_gap(gradient, x, region):
    """Frank-Wolfe gap <grad, x - v> with v the oracle minimizer of <grad, .>."""
    gradient = np.asarray(gradient, dtype=float)
    x = np.asarray(x, dtype=float)
    vertex = region.lmo(gradient)
    return float(np.dot(gradient, x - vertex.point))


def _check_algorithm(cfg, expected):
    if cfg.algorithm != expected:
        raise OptError("config requests %r but the %s driver was called"
                       % (cfg.algorithm, expected))


def _start_vertex(obj, region):
    return region.lmo(np.asarray(obj.grad(np.zeros(region.dim)), dtype=float))


def _gamma(rule, obj, x, d, t, ngd, dns, upper):
    f_along = None
    curvature = None
    if rule.kind == "line_search_exact_quadratic":
        curvature = float(obj.directional_curvature(d))
    elif rule.kind == "line_search_golden":
        f_along = lambda gamma: float(obj.eval(x + gamma * d))
    return step_size(rule, t, ngd, dns, upper, f_along=f_along, curvature=curvature)


def _ratio_cap(x, d):
    """Largest step keeping x + gamma d nonnegative, capped at 1."""
    mask = d < -RATIO_TOL
    if not np.any(mask):
        return 1.0
    return min(1.0, float(np.min(x[mask] / (-d[mask]))))


def _finish(rows, x, obj, region, calls, status, outcomes=None, iterates=None):
    final_f = float(obj.eval(x))
    final_gap = duality_gap(obj.grad(x), x, region)
    return RunTrace(rows, x, final_f, final_gap, calls, status,
                    outcomes, iterates if iterates is not None else [])


def run_fw(obj, region, cfg):
    """Frank-Wolfe: one oracle call per iteration, step toward the vertex."""
    _check_algorithm(cfg, "fw")
    rule = cfg.step_rule
    tic = time.perf_counter()
    x = _start_vertex(obj, region).point.copy()
    elapsed = time.perf_counter() - tic
    calls = 1
    rows, iterates = [], []
    status = "budget"
    for t in range(cfg.budget_iters):
        if cfg.budget_wall_seconds is not None and elapsed >= cfg.budget_wall_seconds:
            status = "time_budget"
            break
        elapsed_before, calls_before = elapsed, calls
        tic = time.perf_counter()
        grad = np.asarray(obj.grad(x), dtype=float)
        if float(np.linalg.norm(grad)) < GRAD_NORM_STOP:
            status = "optimal"
            break
        neg = -grad
        vertex = region.lmo(grad)
        calls += 1
        d = vertex.point - x
        gap = float(np.dot(neg, d))  # equals the duality gap at x_t
        dns = float(np.dot(d, d))
        if dns == 0.0 or gap <= 0.0:
            status = "optimal"
            break
        gamma = _gamma(rule, obj, x, d, t, gap, dns, 1.0)
        x_new = x + gamma * d
        elapsed += time.perf_counter() - tic
        if t % cfg.cadence == 0:
            iterates.append(x)
            rows.append(TraceRow(t, calls_before, elapsed_before, float(obj.eval(x)),
                                 max(gap, 0.0), gamma, 1, "fw", align(neg, d)))
        x = x_new
        if cfg.stop_dual_gap is not None and gap <= cfg.stop_dual_gap:
            status = "gap_target"
            break
    return _finish(rows, x, obj, region, calls, status, iterates=iterates)


def run_boostfw(obj, region, cfg):
    """Boosted Frank-Wolfe: pursuit direction, one oracle call per round."""
    _check_algorithm(cfg, "boostfw")
    rule = cfg.step_rule
    tic = time.perf_counter()
    x = _start_vertex(obj, region).point.copy()
    elapsed = time.perf_counter() - tic
    calls = 1
    rows, iterates, outcomes = [], [], []
    status = "budget"
    for t in range(cfg.budget_iters):
        if cfg.budget_wall_seconds is not None and elapsed >= cfg.budget_wall_seconds:
            status = "time_budget"
            break
        elapsed_before, calls_before = elapsed, calls
        tic = time.perf_counter()
        grad = np.asarray(obj.grad(x), dtype=float)
        if float(np.linalg.norm(grad)) < GRAD_NORM_STOP:
            status = "optimal"
            break
        neg = -grad
        outcome = gradient_pursuit(neg, x, region, cfg.pursuit)
        calls += outcome.rounds_Kt
        g = outcome.direction_g
        gap = float(np.dot(neg, outcome.v0.point - x))
        ngd = float(np.dot(neg, g))
        gns = float(np.dot(g, g))
        if gns == 0.0 or ngd <= 0.0 or gap <= 0.0:
            status = "optimal"
            break
        step_type = "boost" if outcome.rounds_Kt > 1 else "fw"
        gamma = _gamma(rule, obj, x, g, t, ngd, gns, 1.0)
        d_used, gamma_used = g, gamma
        if cfg.worst_case_adjustment and gamma == 1.0:
            # a full step: retreat to the plain step toward the first vertex,
            # re-sizing gamma for that direction
            d_fw = outcome.v0.point - x
            ngd_fw = float(np.dot(neg, d_fw))
            dns_fw = float(np.dot(d_fw, d_fw))
            if dns_fw > 0.0 and ngd_fw > 0.0:
                gamma_used = _gamma(rule, obj, x, d_fw, t, ngd_fw, dns_fw, 1.0)
                d_used = d_fw
                step_type = "adjusted_fw"
        x_new = x + gamma_used * d_used
        elapsed += time.perf_counter() - tic
        outcomes.append(outcome)
        if t % cfg.cadence == 0:
            iterates.append(x)
            rows.append(TraceRow(t, calls_before, elapsed_before, float(obj.eval(x)),
                                 max(gap, 0.0), gamma_used, outcome.rounds_Kt,
                                 step_type, outcome.alignment_final))
        x = x_new
        if cfg.stop_dual_gap is not None and gap <= cfg.stop_dual_gap:
            status = "gap_target"
            break
    return _finish(rows, x, obj, region, calls, status, outcomes, iterates)


def run_afw(obj, region, cfg):
    """Away-step Frank-Wolfe over an explicit active set."""
    _check_algorithm(cfg, "afw")
    if not region.supports_away:
        raise OptError("region does not support away steps")
    rule = cfg.step_rule
    tic = time.perf_counter()
    start = _start_vertex(obj, region)
    x = start.point.copy()
    active = ActiveSet(start)
    elapsed = time.perf_counter() - tic
    calls = 1
    rows, iterates = [], []
    status = "budget"
    for t in range(cfg.budget_iters):
        if cfg.budget_wall_seconds is not None and elapsed >= cfg.budget_wall_seconds:
            status = "time_budget"
            break
        elapsed_before, calls_before = elapsed, calls
        tic = time.perf_counter()
        grad = np.asarray(obj.grad(x), dtype=float)
        if float(np.linalg.norm(grad)) < GRAD_NORM_STOP:
            status = "optimal"
            break
        neg = -grad
        v_fw = region.lmo(grad)
        calls += 1
        d_fw = v_fw.point - x
        gap = float(np.dot(neg, d_fw))
        v_away, gamma_max = away_vertex(active, grad)
        d_away = x - v_away.point
        away_score = float(np.dot(neg, d_away))
        if gap <= 0.0 and away_score <= 0.0:
            status = "optimal"
            break
        take_fw = gap >= away_score or math.isinf(gamma_max)
        if take_fw:
            d, upper, ngd = d_fw, 1.0, gap
        else:
            d, upper, ngd = d_away, gamma_max, away_score
        dns = float(np.dot(d, d))
        if dns == 0.0:
            status = "optimal"
            break
        gamma = _gamma(rule, obj, x, d, t, ngd, dns, upper)
        if take_fw:
            step_type = "fw"
            active.fw_update(v_fw, gamma)
        elif abs(gamma - gamma_max) <= DROP_TOL * max(1.0, gamma_max):
            step_type = "drop"
            gamma = gamma_max  # remove the vertex entirely
            active.away_update(v_away, gamma)
        else:
            step_type = "away"
            active.away_update(v_away, gamma)
        x_new = x + gamma * d
        active.validate(x_new)
        elapsed += time.perf_counter() - tic
        if t % cfg.cadence == 0:
            iterates.append(x)
            rows.append(TraceRow(t, calls_before, elapsed_before, float(obj.eval(x)),
                                 max(gap, 0.0), gamma, 1, step_type, align(neg, d)))
        x = x_new
        if cfg.stop_dual_gap is not None and gap <= cfg.stop_dual_gap:
            status = "gap_target"
            break
    return _finish(rows, x, obj, region, calls, status, iterates=iterates)


def run_dicg(obj, region, cfg):
    """Decomposition-invariant pairwise conditional gradient."""
    _check_algorithm(cfg, "dicg")
    if not getattr(region, "supports_dicg", False):
        raise OptError("region does not support decomposition-invariant steps")
    rule = cfg.step_rule
    tic = time.perf_counter()
    x = _start_vertex(obj, region).point.copy()
    elapsed = time.perf_counter() - tic
    calls = 1
    rows, iterates = [], []
    status = "budget"
    for t in range(cfg.budget_iters):
        if cfg.budget_wall_seconds is not None and elapsed >= cfg.budget_wall_seconds:
            status = "time_budget"
            break
        elapsed_before, calls_before = elapsed, calls
        tic = time.perf_counter()
        grad = np.asarray(obj.grad(x), dtype=float)
        if float(np.linalg.norm(grad)) < GRAD_NORM_STOP:
            status = "optimal"
            break
        neg = -grad
        v_fw = region.lmo(grad)
        calls += 1
        v_away = dicg_away_vertex(x, grad, region)
        calls += 1
        gap = float(np.dot(neg, v_fw.point - x))
        if v_fw.key == v_away.key:
            status = "optimal"  # the masked support already agrees with the oracle
            break
        d = v_fw.point - v_away.point
        ngd = float(np.dot(neg, d))
        dns = float(np.dot(d, d))
        if dns == 0.0 or ngd <= 0.0:
            status = "optimal"
            break
        gamma_bar = _ratio_cap(x, d)
        if gamma_bar <= 0.0:
            status = "optimal"
            break
        gamma = _gamma(rule, obj, x, d, t, ngd, dns, gamma_bar)
        x_new = x + gamma * d
        if not region.contains(x_new, 1e-9):
            raise OptError("pairwise step left the region")
        elapsed += time.perf_counter() - tic
        if t % cfg.cadence == 0:
            iterates.append(x)
            rows.append(TraceRow(t, calls_before, elapsed_before, float(obj.eval(x)),
                                 max(gap, 0.0), gamma, 1, "pairwise", align(neg, d)))
        x = x_new
        if cfg.stop_dual_gap is not None and gap <= cfg.stop_dual_gap:
            status = "gap_target"
            break
    return _finish(rows, x, obj, region, calls, status, iterates=iterates)


def run_boostdicg(obj, region, cfg):
    """Boosted DICG: pursuit anchored at the masked away vertex."""
    _check_algorithm(cfg, "boostdicg")
    if not getattr(region, "supports_dicg", False):
        raise OptError("region does not support decomposition-invariant steps")
    rule = cfg.step_rule
    tic = time.perf_counter()
    x = _start_vertex(obj, region).point.copy()
    elapsed = time.perf_counter() - tic
    calls = 1
    rows, iterates, outcomes = [], [], []
    status = "budget"
    for t in range(cfg.budget_iters):
        if cfg.budget_wall_seconds is not None and elapsed >= cfg.budget_wall_seconds:
            status = "time_budget"
            break
        elapsed_before, calls_before = elapsed, calls
        tic = time.perf_counter()
        grad = np.asarray(obj.grad(x), dtype=float)
        if float(np.linalg.norm(grad)) < GRAD_NORM_STOP:
            status = "optimal"
            break
        neg = -grad
        v_away = dicg_away_vertex(x, grad, region)
        calls += 1
        outcome = gradient_pursuit(neg, v_away.point, region, cfg.pursuit)
        calls += outcome.rounds_Kt
        g = outcome.direction_g
        gap = float(np.dot(neg, outcome.v0.point - x))
        ngd = float(np.dot(neg, g))
        gns = float(np.dot(g, g))
        if gns == 0.0 or ngd <= 0.0:
            status = "optimal"
            break
        gamma_bar = _ratio_cap(x, g)
        if gamma_bar <= 0.0:
            status = "optimal"
            break
        gamma = _gamma(rule, obj, x, g, t, ngd, gns, gamma_bar)
        x_new = x + gamma * g
        if not region.contains(x_new, 1e-9):
            raise OptError("boosted pairwise step left the region")
        elapsed += time.perf_counter() - tic
        outcomes.append(outcome)
        if t % cfg.cadence == 0:
            iterates.append(x)
            rows.append(TraceRow(t, calls_before, elapsed_before, float(obj.eval(x)),
                                 max(gap, 0.0), gamma, outcome.rounds_Kt,
                                 "boost" if outcome.rounds_Kt > 1 else "pairwise",
                                 outcome.alignment_final))
        x = x_new
        if cfg.stop_dual_gap is not None and gap <= cfg.stop_dual_gap:
            status = "gap_target"
            break
    return _finish(rows, x, obj, region, calls, status, outcomes, iterates)


_DRIVERS = {"fw": run_fw, "boostfw": run_boostfw, "afw": run_afw,
            "dicg": run_dicg, "boostdicg": run_boostdicg}


def run(obj, region, cfg):
    """Dispatch to the driver named by cfg.algorithm."""
    return _DRIVERS[cfg.algorithm](obj, region, cfg)
