"""Solver drivers: step rules, traces, stopping, and oracle accounting."""

import numpy as np
import pytest

from boostcg import (ExplicitPolytope, GenericQuadraticInstance, L1Ball,
                     NuclearBall, OptError, PursuitConfig, ScaledSimplex,
                     SolverConfig, SquaredDistance, StepRule, duality_gap,
                     run, step_size)
from boostcg.solvers import (_golden_section, _ratio_cap, run_afw,
                             run_boostdicg, run_boostfw, run_dicg, run_fw)

TRIANGLE = ExplicitPolytope([(0.0, 1.0), (-1.0, 0.0), (1.0, 0.0)])


def quadratic_on_simplex(n, seed):
    # strongly convex quadratic with a dirichlet target inside the simplex
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    A = B.T @ B / n + np.eye(n)
    target = rng.dirichlet(np.ones(n))
    return GenericQuadraticInstance(A, -(A @ target)), ScaledSimplex(n, 1.0)


# -------------------------------------------------------------- step sizes


def test_step_size_agnostic_schedule():
    rule = StepRule("agnostic")
    assert step_size(rule, 0, 1.0, 1.0, 1.0) == 1.0
    assert step_size(rule, 2, 1.0, 1.0, 1.0) == 0.5
    assert step_size(rule, 0, 1.0, 1.0, 0.25) == 0.25


def test_step_size_short_step():
    rule = StepRule("short_step", L=1.0)
    assert step_size(rule, 0, 1.0, 1.0, 1.0) == 1.0
    assert step_size(StepRule("short_step", L=2.0), 0, 1.0, 1.0, 1.0) == 0.5
    assert step_size(rule, 0, 5.0, 1.0, 1.0) == 1.0  # capped by upper
    with pytest.raises(OptError):
        step_size(rule, 0, -1e-6, 1.0, 1.0)


def test_step_size_exact_quadratic():
    rule = StepRule("line_search_exact_quadratic")
    assert step_size(rule, 0, 1.0, 1.0, 1.0, curvature=2.0) == 0.5
    assert step_size(rule, 0, 5.0, 1.0, 1.0, curvature=2.0) == 1.0
    assert step_size(rule, 0, -1.0, 1.0, 1.0, curvature=2.0) == 0.0
    # affine slice: run to the descending end
    assert step_size(rule, 0, 1.0, 1.0, 1.0, curvature=0.0) == 1.0
    assert step_size(rule, 0, -1.0, 1.0, 1.0, curvature=-1.0) == 0.0
    with pytest.raises(OptError):
        step_size(rule, 0, 1.0, 1.0, 1.0)


def test_step_size_golden_section():
    rule = StepRule("line_search_golden")
    got = step_size(rule, 0, 1.0, 1.0, 1.0,
                    f_along=lambda g: (g - 0.3) ** 2)
    assert abs(got - 0.3) <= 1e-9
    with pytest.raises(OptError):
        step_size(rule, 0, 1.0, 1.0, 1.0)


def test_step_size_validates_direction_and_upper():
    rule = StepRule("agnostic")
    with pytest.raises(OptError):
        step_size(rule, 0, 1.0, 0.0, 1.0)
    with pytest.raises(OptError):
        step_size(rule, 0, 1.0, 1.0, 0.0)


def test_golden_section_recovers_interior_minimum():
    got = _golden_section(lambda g: (g - 0.3) ** 2, 1.0, 1e-10, 200)
    assert got == 0.30000000000387356


def test_step_rule_validation():
    with pytest.raises(OptError):
        StepRule("newton")
    with pytest.raises(OptError):
        StepRule("short_step")  # needs L
    with pytest.raises(OptError):
        StepRule("short_step", L=0.0)


def test_solver_config_validation():
    with pytest.raises(OptError):
        SolverConfig(algorithm="sgd")
    with pytest.raises(OptError):
        SolverConfig(algorithm="fw", budget_iters=0)
    with pytest.raises(OptError):
        SolverConfig(algorithm="boostfw")  # boosted needs pursuit settings
    with pytest.raises(OptError):
        SolverConfig(algorithm="fw", pursuit=PursuitConfig())
    with pytest.raises(OptError):
        SolverConfig(algorithm="fw", stop_dual_gap=-1.0)
    with pytest.raises(OptError):
        SolverConfig(algorithm="fw", cadence=0)
    with pytest.raises(OptError):
        SolverConfig(algorithm="fw", budget_wall_seconds=-1.0)


# ------------------------------------------------------------ duality gap


def test_duality_gap_triangle_apex():
    assert duality_gap(np.array([0.0, 1.0]), np.array([0.0, 1.0]), TRIANGLE) == 1.0


def test_duality_gap_zero_gradient():
    assert duality_gap(np.zeros(2), np.array([0.0, 1.0]), TRIANGLE) == 0.0


def test_duality_gap_bounds_primal_gap():
    obj, region = quadratic_on_simplex(15, 2)
    fstar = obj.unconstrained_min_value
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = rng.dirichlet(np.ones(15))
        gap = duality_gap(np.asarray(obj.grad(x)), x, region)
        assert gap >= obj.eval(x) - fstar - 1e-10


def test_ratio_cap_limits_negative_coordinates():
    x = np.array([0.5, 0.5, 0.0])
    d = np.array([1.0, -1.0, 0.0])
    assert _ratio_cap(x, d) == 0.5
    assert _ratio_cap(x, np.array([1.0, 1.0, 0.0])) == 1.0


# -------------------------------------------------------------- plain fw


def test_fw_triangle_zig_zag():
    obj = SquaredDistance(np.zeros(2), scale=0.5, known_optimum=0.0)
    cfg = SolverConfig(algorithm="fw",
                       step_rule=StepRule("line_search_exact_quadratic"),
                       budget_iters=8)
    trace = run_fw(obj, TRIANGLE, cfg)
    assert np.array_equal(trace.iterates[0], [0.0, 1.0])
    assert np.array_equal(trace.iterates[1], [-0.5, 0.5])
    assert trace.final_f == 0.014110551504446567
    assert trace.status == "budget"
    assert trace.total_oracle_calls == 9
    fs = [row.f_value for row in trace.rows]
    assert fs[0] == 0.5 and fs[1] == 0.25
    assert all(b <= a for a, b in zip(fs, fs[1:]))


def test_fw_immediate_optimum_records_nothing():
    # the start vertex is the unconstrained minimizer: zero gradient there
    obj = SquaredDistance(np.array([1.0, 0.0, 0.0]), scale=0.5)
    cfg = SolverConfig(algorithm="fw", budget_iters=10)
    trace = run_fw(obj, ScaledSimplex(3, 1.0), cfg)
    assert trace.status == "optimal"
    assert trace.rows == []
    assert trace.total_oracle_calls == 1
    assert np.array_equal(trace.final_x, [1.0, 0.0, 0.0])
    assert trace.final_gap == 0.0


def test_fw_simplex_lower_bound_before_support_is_full():
    # on f(x) = ||x||^2 over the simplex, any t-vertex combination has
    # f >= 1/t, so early iterates cannot beat 1/(t+1)
    n = 20
    obj = SquaredDistance(np.zeros(n), scale=1.0)
    cfg = SolverConfig(algorithm="fw",
                       step_rule=StepRule("line_search_exact_quadratic"),
                       budget_iters=n - 1)
    trace = run_fw(obj, ScaledSimplex(n, 1.0), cfg)
    for row in trace.rows:
        assert row.f_value >= 1.0 / (row.iter + 1) - 1e-12


# ------------------------------------------------------------- boosted fw


def boost_cfg(**kw):
    defaults = dict(algorithm="boostfw", pursuit=PursuitConfig(delta=1e-3))
    defaults.update(kw)
    return SolverConfig(**defaults)


def test_boostfw_triangle_single_iteration():
    obj = SquaredDistance(np.zeros(2), scale=0.5, known_optimum=0.0)
    cfg = boost_cfg(step_rule=StepRule("short_step", L=1.0), budget_iters=10)
    trace = run_boostfw(obj, TRIANGLE, cfg)
    assert trace.final_f == 0.0
    assert trace.status == "optimal"
    assert len(trace.rows) == 1
    row = trace.rows[0]
    assert (row.iter, row.K_t, row.gamma, row.step_type) == (0, 2, 1.0, "boost")
    assert row.duality_gap == 1.0
    assert row.oracle_calls == 1
    assert trace.total_oracle_calls == 3
    assert trace.pursuit_outcomes[0].oracle_calls == 2


def test_boostfw_contracts_fast_on_barycenter():
    n = 3
    center = np.full(n, 1.0 / n)
    obj = SquaredDistance(center, scale=0.5)
    cfg = boost_cfg(step_rule=StepRule("short_step", L=1.0), budget_iters=50,
                    worst_case_adjustment=True)
    trace = run_boostfw(obj, ScaledSimplex(n, 1.0), cfg)
    assert trace.status == "optimal"
    assert trace.final_gap < 1e-10
    assert all(row.step_type != "adjusted_fw" for row in trace.rows)


def test_boostfw_adjustment_retreats_to_plain_step():
    # agnostic gamma at t=0 is exactly 1, which triggers the retreat
    obj = SquaredDistance(np.zeros(2), scale=0.5)
    cfg = boost_cfg(step_rule=StepRule("agnostic"), budget_iters=1,
                    worst_case_adjustment=True)
    trace = run_boostfw(obj, TRIANGLE, cfg)
    row = trace.rows[0]
    assert row.step_type == "adjusted_fw"
    assert row.gamma == 1.0
    assert row.K_t == 2
    assert row.eta == 1.0
    assert np.array_equal(trace.final_x, [-1.0, 0.0])


def test_boostfw_degenerate_pursuit_is_optimal_stop():
    # anchor sits at the vertex the oracle keeps returning
    obj = SquaredDistance(np.array([2.0, 0.0, 0.0]), scale=0.5)
    cfg = boost_cfg(budget_iters=10)
    trace = run_boostfw(obj, ScaledSimplex(3, 1.0), cfg)
    assert trace.status == "optimal"
    assert trace.rows == []
    assert np.array_equal(trace.final_x, [1.0, 0.0, 0.0])


# ------------------------------------------------------------------- afw


def test_afw_triangle_walkthrough():
    obj = SquaredDistance(np.zeros(2), scale=0.5, known_optimum=0.0)
    cfg = SolverConfig(algorithm="afw",
                       step_rule=StepRule("line_search_exact_quadratic"),
                       budget_iters=5)
    trace = run_afw(obj, TRIANGLE, cfg)
    assert [row.step_type for row in trace.rows] == \
        ["fw", "fw", "fw", "away", "fw"]
    assert [row.gamma for row in trace.rows] == [
        0.5, 0.4, 0.15384615384615388, 0.32876712328767127,
        0.08429795882300958]
    assert trace.final_f == 3.054516769487905e-05
    assert trace.total_oracle_calls == 6
    expect = [(0.0, 1.0), (-0.5, 0.5), (0.10000000000000009, 0.3),
              (-0.0692307692307692, 0.25384615384615383),
              (-0.09199157007376182, 0.00853530031612218)]
    for got, want in zip(trace.iterates, expect):
        assert np.array_equal(got, want)


def test_afw_drop_step_removes_vertex():
    obj = SquaredDistance(np.array([0.7, 0.3]), scale=0.5)
    cfg = SolverConfig(algorithm="afw", step_rule=StepRule("agnostic"),
                       budget_iters=3)
    trace = run_afw(obj, ScaledSimplex(2, 1.0), cfg)
    assert [row.step_type for row in trace.rows] == ["fw", "fw", "drop"]
    assert [row.gamma for row in trace.rows] == [
        1.0, 0.6666666666666666, 0.5000000000000001]
    assert np.allclose(trace.final_x, [1.0, 0.0], atol=1e-12)


def test_afw_rejects_regions_without_vertex_tracking():
    obj = SquaredDistance(np.zeros(4), scale=0.5)
    cfg = SolverConfig(algorithm="afw", budget_iters=3)
    with pytest.raises(OptError):
        run_afw(obj, NuclearBall(2, 2, 1.0), cfg)


# ------------------------------------------------------------------ dicg


def test_dicg_stops_when_forward_equals_away():
    obj = SquaredDistance(np.array([1.5, 0.0, 0.0]), scale=0.5)
    cfg = SolverConfig(algorithm="dicg", budget_iters=10)
    trace = run_dicg(obj, ScaledSimplex(3, 1.0), cfg)
    assert trace.status == "optimal"
    assert trace.rows == []
    assert trace.total_oracle_calls == 3
    assert np.array_equal(trace.final_x, [1.0, 0.0, 0.0])


def test_dicg_rejects_unsupported_regions():
    obj = SquaredDistance(np.zeros(3), scale=0.5)
    cfg = SolverConfig(algorithm="dicg", budget_iters=3)
    with pytest.raises(OptError):
        run_dicg(obj, L1Ball(3, 1.0), cfg)


def test_dicg_pairwise_descends_on_quadratic():
    obj, region = quadratic_on_simplex(10, 6)
    cfg = SolverConfig(algorithm="dicg",
                       step_rule=StepRule("line_search_exact_quadratic"),
                       budget_iters=60)
    trace = run_dicg(obj, region, cfg)
    fs = [row.f_value for row in trace.rows]
    assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))
    assert all(row.step_type in ("pairwise", "boost") for row in trace.rows)
    assert trace.final_f <= fs[0]


# -------------------------------------------------------------- accounting


def test_oracle_call_accounting_across_algorithms():
    obj, region = quadratic_on_simplex(10, 1)

    def rows_for(algorithm, pursuit=None):
        cfg = SolverConfig(algorithm=algorithm, step_rule=StepRule("agnostic"),
                           pursuit=pursuit, budget_iters=7)
        return run(obj, region, cfg)

    fw = rows_for("fw")
    assert [r.oracle_calls for r in fw.rows] == [1, 2, 3, 4, 5, 6, 7]
    assert fw.total_oracle_calls == 8

    afw = rows_for("afw")
    assert [r.oracle_calls for r in afw.rows] == [1, 2, 3, 4, 5, 6, 7]
    assert afw.total_oracle_calls == 8

    dicg = rows_for("dicg")
    assert [r.oracle_calls for r in dicg.rows] == [1, 3, 5, 7, 9, 11, 13]
    assert dicg.total_oracle_calls == 15

    boost = rows_for("boostfw", PursuitConfig(delta=1e-3))
    assert [r.K_t for r in boost.rows] == [3, 3, 9, 7, 3, 8, 3]
    assert [r.oracle_calls for r in boost.rows] == [1, 4, 7, 16, 23, 26, 34]
    assert boost.total_oracle_calls == 37

    bdicg = rows_for("boostdicg", PursuitConfig(delta=1e-3))
    assert [r.K_t for r in bdicg.rows] == [3, 2, 3, 2, 2, 2, 2]
    assert [r.oracle_calls for r in bdicg.rows] == [1, 5, 8, 12, 15, 18, 21]
    assert bdicg.total_oracle_calls == 24


ALL_CONFIGS = [
    ("fw", None),
    ("afw", None),
    ("dicg", None),
    ("boostfw", PursuitConfig(delta=1e-3)),
    ("boostdicg", PursuitConfig(delta=1e-3)),
]


@pytest.mark.parametrize("algorithm,pursuit", ALL_CONFIGS)
@pytest.mark.parametrize("rule_kind", [
    "short_step", "line_search_exact_quadratic", "line_search_golden"])
def test_descent_rules_are_monotone_and_feasible(algorithm, pursuit, rule_kind):
    obj, region = quadratic_on_simplex(12, 9)
    if rule_kind == "short_step":
        rule = StepRule("short_step", L=obj.smoothness_L)
    else:
        rule = StepRule(rule_kind)
    cfg = SolverConfig(algorithm=algorithm, step_rule=rule, pursuit=pursuit,
                       budget_iters=40)
    trace = run(obj, region, cfg)
    fs = [row.f_value for row in trace.rows]
    assert all(b <= a + 1e-12 * max(1.0, abs(a)) for a, b in zip(fs, fs[1:]))
    for x in trace.iterates:
        assert region.contains(x, 1e-9)
    assert region.contains(trace.final_x, 1e-9)
    assert trace.final_f == pytest.approx(obj.eval(trace.final_x), rel=1e-15)


@pytest.mark.parametrize("algorithm,pursuit", ALL_CONFIGS)
def test_lower_bound_per_oracle_call(algorithm, pursuit):
    # on f(x) = ||x||^2 over the simplex, after c oracle calls at most c
    # vertices are known, so f >= 1/(c+1) minus rounding
    n = 50
    obj = SquaredDistance(np.zeros(n), scale=1.0)
    cfg = SolverConfig(algorithm=algorithm,
                       step_rule=StepRule("line_search_exact_quadratic"),
                       pursuit=pursuit, budget_iters=30)
    trace = run(obj, ScaledSimplex(n, 1.0), cfg)
    for row in trace.rows:
        assert row.f_value >= 1.0 / (row.oracle_calls + 1) - 1e-12


# ------------------------------------------------------- stopping and rows


def test_status_budget_is_the_default():
    obj, region = quadratic_on_simplex(8, 3)
    cfg = SolverConfig(algorithm="fw", budget_iters=5)
    assert run(obj, region, cfg).status == "budget"


def test_status_gap_target():
    obj, region = quadratic_on_simplex(8, 3)
    cfg = SolverConfig(algorithm="fw", budget_iters=50, stop_dual_gap=100.0)
    trace = run(obj, region, cfg)
    assert trace.status == "gap_target"
    assert len(trace.rows) == 1


def test_status_time_budget_before_first_iteration():
    obj, region = quadratic_on_simplex(8, 3)
    cfg = SolverConfig(algorithm="fw", budget_iters=50, budget_wall_seconds=0.0)
    trace = run(obj, region, cfg)
    assert trace.status == "time_budget"
    assert trace.rows == []
    assert trace.total_oracle_calls == 1


def test_cadence_gates_rows_and_iterates_together():
    obj, region = quadratic_on_simplex(8, 3)
    cfg = SolverConfig(algorithm="fw", budget_iters=10, cadence=3)
    trace = run(obj, region, cfg)
    assert [row.iter for row in trace.rows] == [0, 3, 6, 9]
    assert len(trace.iterates) == len(trace.rows)
    for row, x in zip(trace.rows, trace.iterates):
        assert row.f_value == pytest.approx(obj.eval(x), rel=1e-15)


def test_trace_rows_have_clamped_gaps_and_elapsed_order():
    obj, region = quadratic_on_simplex(8, 5)
    cfg = SolverConfig(algorithm="boostfw", pursuit=PursuitConfig(),
                       budget_iters=20)
    trace = run(obj, region, cfg)
    assert all(row.duality_gap >= 0.0 for row in trace.rows)
    elapsed = [row.elapsed_s for row in trace.rows]
    assert all(b >= a for a, b in zip(elapsed, elapsed[1:]))
    assert trace.final_gap >= 0.0


def test_run_dispatch_and_algorithm_mismatch():
    obj, region = quadratic_on_simplex(6, 2)
    cfg = SolverConfig(algorithm="fw", budget_iters=3)
    direct = run_fw(obj, region, cfg)
    routed = run(obj, region, cfg)
    assert [r.f_value for r in direct.rows] == [r.f_value for r in routed.rows]
    with pytest.raises(OptError):
        run_afw(obj, region, cfg)  # cfg says fw
