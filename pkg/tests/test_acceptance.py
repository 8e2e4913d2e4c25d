"""End-to-end acceptance checks, one test per shipped guarantee.

Each test pins the guarantee it verifies (analytic values where they exist,
property suites elsewhere) and asserts its own wall-clock budget.
"""

import math
import time

import numpy as np
import pytest

from boostcg import (ActiveSet, DagFlowRegion, ExplicitPolytope,
                     GenericQuadraticInstance, NuclearBall, PursuitConfig,
                     ScaledSimplex, SolverConfig, SquaredDistance, StepRule,
                     Vertex, align, completion, duality_gap,
                     estimate_smoothness, lift_l1, lift_objective, project_l1,
                     run, sparse_recovery, traffic)

TRIANGLE = ExplicitPolytope([(0.0, 1.0), (-1.0, 0.0), (1.0, 0.0)])


def norm_half_squared(n):
    return SquaredDistance(np.zeros(n), scale=0.5)


def assert_monotone(values):
    for a, b in zip(values, values[1:]):
        assert b <= a + 1e-12 * max(1.0, abs(a))


class RecordingRegion:
    """Delegating wrapper that keeps every vertex the oracle returns."""

    def __init__(self, inner):
        self.inner = inner
        self.outputs = []
        self.dim = inner.dim
        self.diameter_bound = inner.diameter_bound
        self.supports_away = inner.supports_away
        self.supports_dicg = inner.supports_dicg

    def lmo(self, cost):
        vertex = self.inner.lmo(cost)
        self.outputs.append(vertex)
        return vertex

    def contains(self, x, tol=1e-9):
        return self.inner.contains(x, tol)


def test_acceptance_01_triangle_boosting_solves_in_one_iteration():
    start = time.perf_counter()
    obj = norm_half_squared(2)  # L = 1, minimum 0 at the origin

    boosted = run(obj, TRIANGLE, SolverConfig(
        algorithm="boostfw", step_rule=StepRule("short_step", L=1.0),
        pursuit=PursuitConfig(delta=1e-3), budget_iters=10))
    assert len(boosted.rows) == 1
    assert boosted.final_f <= 1e-14  # primal gap: the optimum value is 0
    assert boosted.rows[0].K_t == 2
    assert boosted.pursuit_outcomes[0].oracle_calls == 2

    plain = run(obj, TRIANGLE, SolverConfig(
        algorithm="fw", step_rule=StepRule("line_search_exact_quadratic"),
        budget_iters=8))
    assert plain.final_f == 0.014110551504446567 > 1e-3

    assert time.perf_counter() - start < 1.0


def test_acceptance_02_oracle_call_lower_bound_on_large_simplex():
    start = time.perf_counter()
    obj = SquaredDistance(np.zeros(1000), scale=1.0)  # f(x) = ||x||^2
    region = ScaledSimplex(1000, 1.0)
    for algorithm, pursuit in (("fw", None), ("boostfw", PursuitConfig())):
        trace = run(obj, region, SolverConfig(
            algorithm=algorithm,
            step_rule=StepRule("line_search_exact_quadratic"),
            pursuit=pursuit, budget_iters=300))
        for row in trace.rows:
            assert row.f_value >= 1.0 / (row.oracle_calls + 1) - 1e-12
        assert trace.final_f >= 1.0 / 1000
    assert time.perf_counter() - start < 30.0


def test_acceptance_03_lift_project_round_trip_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    n = 37
    checked = 0
    while checked < 1000:
        x = rng.standard_normal(n) * 10.0 ** rng.integers(-3, 4)
        l1 = float(np.abs(x).sum())
        if l1 == 0.0:
            continue
        tau = l1 if checked % 5 == 0 else l1 * float(rng.uniform(1.0, 2.0))
        z = lift_l1(x, tau)
        assert np.array_equal(project_l1(z), x)
        assert np.all(z >= 0.0)
        assert ScaledSimplex(2 * n, tau).contains(z, 1e-12)
        checked += 1
    assert time.perf_counter() - start < 1.0


def test_acceptance_04_pursuit_run_invariants_hold():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    B = rng.standard_normal((50, 50))
    A = B.T @ B / 50 + np.eye(50)
    target = rng.dirichlet(np.ones(50))
    obj = GenericQuadraticInstance(A, -A @ target)
    region = ScaledSimplex(50, 1.0)
    delta = 1e-3
    trace = run(obj, region, SolverConfig(
        algorithm="boostfw",
        step_rule=StepRule("short_step", L=obj.smoothness_L),
        pursuit=PursuitConfig(delta=delta), budget_iters=200))
    assert len(trace.pursuit_outcomes) == 200
    for x, outcome in zip(trace.iterates, trace.pursuit_outcomes):
        assert region.contains(x, 1e-9)
        for r in outcome.round_trace:
            assert r.lam >= -1e-12
            if r.backward_factor is not None:
                assert r.backward_factor >= 0.5 - 1e-12
        residuals = [r.residual_norm for r in outcome.round_trace]
        for a, b in zip(residuals, residuals[1:]):
            assert b <= a
        neg = -np.asarray(obj.grad(x), dtype=float)
        base = align(neg, outcome.v0.point - x)
        K = outcome.rounds_Kt
        assert outcome.alignment_final >= base + (K - 1) * delta - 1e-9
    assert time.perf_counter() - start < 10.0


def barycenter_problem():
    n = 20
    return SquaredDistance(np.full(n, 1.0 / n), scale=0.5), ScaledSimplex(n, 1.0)


def test_acceptance_05_boosted_primal_gap_decays_linearly():
    start = time.perf_counter()
    obj, region = barycenter_problem()  # mu = L = 1, optimum value 0
    delta = 1e-3
    trace = run(obj, region, SolverConfig(
        algorithm="boostfw", step_rule=StepRule("short_step", L=1.0),
        pursuit=PursuitConfig(delta=delta), budget_iters=500))
    assert trace.status == "optimal"
    assert len(trace.rows) == 110

    # primal gap <= (L D^2 / 2) exp(-delta^2 N_t) with N_t counted from the
    # trace: iterations up to t whose step was partial and used > 1 round
    half_ld2 = 0.5 * 1.0 * region.diameter_bound ** 2
    boosted_so_far = 0
    for row in trace.rows:
        if row.gamma < 1.0 and row.K_t > 1:
            boosted_so_far += 1
        bound = half_ld2 * math.exp(-delta ** 2 * boosted_so_far)
        assert row.f_value <= bound + 1e-12

    below = [row.iter for row in trace.rows if row.f_value < 1e-8]
    assert below and below[0] == 17 <= 500
    logged = [(row.iter, math.log(row.f_value))
              for row in trace.rows if row.f_value > 0.0]
    slope = np.polyfit([p[0] for p in logged], [p[1] for p in logged], 1)[0]
    assert slope < 0.0
    assert slope == pytest.approx(-0.522041532610704, rel=1e-9)
    assert time.perf_counter() - start < 10.0


def test_acceptance_06_worst_case_adjustment_keeps_sublinear_bound():
    start = time.perf_counter()
    obj, region = barycenter_problem()
    trace = run(obj, region, SolverConfig(
        algorithm="boostfw", step_rule=StepRule("short_step", L=1.0),
        pursuit=PursuitConfig(delta=1e-3), budget_iters=500,
        worst_case_adjustment=True))
    four_ld2 = 4.0 * 1.0 * region.diameter_bound ** 2
    for row in trace.rows:
        assert row.f_value <= four_ld2 / (row.iter + 2) + 1e-12
    # on this instance the boosted step never needs the fallback
    assert all(row.step_type != "adjusted_fw" for row in trace.rows)
    assert trace.status == "optimal"
    assert time.perf_counter() - start < 10.0


def test_acceptance_07_away_steps_converge_and_drops_empty_vertices():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    B = rng.standard_normal((30, 30))
    A = B.T @ B / 30 + np.eye(30)
    target = rng.dirichlet(np.ones(30))
    obj = GenericQuadraticInstance(A, -A @ target)
    region = ScaledSimplex(30, 1.0)
    rules = (StepRule("short_step", L=obj.smoothness_L),
             StepRule("line_search_exact_quadratic"))
    for rule in rules:
        trace = run(obj, region, SolverConfig(
            algorithm="afw", step_rule=rule, budget_iters=2000,
            stop_dual_gap=1e-8))
        # run_afw revalidates its active set (positivity, unit mass, drift)
        # after every update, so finishing certifies those invariants
        assert trace.status in ("gap_target", "optimal")
        assert trace.rows[-1].iter < 2000
        assert trace.final_gap < 1e-8  # the duality gap bounds the primal gap
        assert_monotone([row.f_value for row in trace.rows])

    # a drop step removes the away vertex outright: deterministic walkthrough
    drop = run(SquaredDistance(np.array([0.7, 0.3]), scale=0.5),
               ScaledSimplex(2, 1.0),
               SolverConfig(algorithm="afw", step_rule=StepRule("agnostic"),
                            budget_iters=3))
    assert [row.step_type for row in drop.rows] == ["fw", "fw", "drop"]
    assert np.allclose(drop.final_x, [1.0, 0.0], atol=1e-12)

    # and on the active set itself the dropped vertex disappears exactly
    v_a = Vertex(0, np.array([1.0, 0.0]))
    v_b = Vertex(1, np.array([0.0, 1.0]))
    active = ActiveSet(v_a)
    active.fw_update(v_b, 0.25)
    active.away_update(v_b, 0.25 / 0.75)  # the feasibility cap w/(1-w)
    assert [(v.key, w) for v, w in active.items()] == [(0, 1.0)]
    assert time.perf_counter() - start < 20.0


def test_acceptance_08_boosting_beats_plain_fw_tenfold_on_recovery():
    start = time.perf_counter()
    inner, _, tau = sparse_recovery(m=40, n=100, sparsity=8, sigma=0.05,
                                    seed=11)
    obj = lift_objective(inner)
    region = ScaledSimplex(200, tau)
    rule = StepRule("line_search_exact_quadratic")
    plain = run(obj, region, SolverConfig(algorithm="fw", step_rule=rule,
                                          budget_iters=400))
    boosted = run(obj, region, SolverConfig(algorithm="boostfw",
                                            step_rule=rule,
                                            pursuit=PursuitConfig(),
                                            budget_iters=400))
    reference = run(obj, region, SolverConfig(algorithm="boostfw",
                                              step_rule=rule,
                                              pursuit=PursuitConfig(),
                                              budget_iters=3000))
    f_star = min(min(r.f_value for t in (plain, boosted, reference)
                     for r in t.rows),
                 plain.final_f, boosted.final_f, reference.final_f)
    plain_gaps = [r.f_value - f_star for r in plain.rows]
    g_star = min(plain_gaps)
    t_star = plain.rows[plain_gaps.index(g_star)].iter
    boosted_at = {r.iter: r.f_value - f_star for r in boosted.rows}
    assert boosted_at[t_star] <= g_star / 10.0
    assert time.perf_counter() - start < 30.0


def test_acceptance_09_traffic_assignment_smoke():
    start = time.perf_counter()
    obj, network = traffic(layers=4, width=5, drop=0.5, seed=1)
    region = DagFlowRegion(network)
    L_hat = estimate_smoothness(obj, region, num_pairs=1000, seed=1).L_hat
    trace = run(obj, region, SolverConfig(
        algorithm="boostfw", step_rule=StepRule("short_step", L=L_hat),
        pursuit=PursuitConfig(max_rounds_K=5), budget_iters=300))
    assert_monotone([row.f_value for row in trace.rows])
    initial_gap = trace.rows[0].duality_gap
    assert any(row.duality_gap < 0.01 * initial_gap for row in trace.rows)
    for x in trace.iterates:  # nonnegative and demand-consistent flows
        assert region.contains(x, 1e-8)
    assert time.perf_counter() - start < 60.0


def test_acceptance_10_nuclear_completion_lmo_outputs_on_sphere():
    start = time.perf_counter()
    obj, planted = completion(m=30, n=40, rank=2, observed_fraction=0.3,
                              seed=3, rho=1.0)
    tau = 2.0 * float(np.linalg.svd(planted, compute_uv=False).sum())
    region = RecordingRegion(NuclearBall(30, 40, tau))
    trace = run(obj, region, SolverConfig(
        algorithm="boostfw", step_rule=StepRule("line_search_golden"),
        pursuit=PursuitConfig(), budget_iters=150))
    assert_monotone([row.f_value for row in trace.rows])
    assert len(region.outputs) > 150
    for vertex in region.outputs:  # rank one with top singular value tau
        svals = np.linalg.svd(vertex.point.reshape(30, 40), compute_uv=False)
        assert abs(svals[0] - tau) <= 1e-6
        assert svals[1] <= 1e-6
    for x in trace.iterates:
        assert duality_gap(obj.grad(x), x, region.inner) >= 0.0
    assert time.perf_counter() - start < 60.0


def test_acceptance_11_single_round_boosting_reduces_to_baselines():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    B = rng.standard_normal((12, 12))
    A = B.T @ B / 12 + np.eye(12)
    target = rng.dirichlet(np.ones(12))
    obj = GenericQuadraticInstance(A, -A @ target)
    region = ScaledSimplex(12, 1.0)
    rules = (StepRule("agnostic"),
             StepRule("short_step", L=obj.smoothness_L),
             StepRule("line_search_exact_quadratic"))
    pairs = (("fw", "boostfw"), ("dicg", "boostdicg"))
    for rule in rules:
        for baseline, boosted in pairs:
            base_trace = run(obj, region, SolverConfig(
                algorithm=baseline, step_rule=rule, budget_iters=40))
            boost_trace = run(obj, region, SolverConfig(
                algorithm=boosted, step_rule=rule,
                pursuit=PursuitConfig(max_rounds_K=1), budget_iters=40))
            assert len(base_trace.rows) == len(boost_trace.rows)
            for a, b in zip(base_trace.rows, boost_trace.rows):
                assert (a.iter, a.oracle_calls, a.f_value, a.duality_gap,
                        a.gamma, a.K_t, a.step_type, a.eta) == \
                       (b.iter, b.oracle_calls, b.f_value, b.duality_gap,
                        b.gamma, b.K_t, b.step_type, b.eta)
    assert time.perf_counter() - start < 10.0
