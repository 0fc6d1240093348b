"""Splitting layer: half-steps, acceptance, corrector, runs, embedding."""

import numpy as np
import pytest

import irsplit as ir
from irsplit.dr import (DRParams, SplitTriple, a_step, classical_dr_step,
                        dr_acceptance, dr_extrapolate, dr_update, embed_to_hpp,
                        inner_loop, run_dr, theta)
from irsplit.errors import BudgetExceeded, ZeroVectorError
from irsplit.operators import (AffineOperator, AffineResolvent, CGBProcedure,
                               ExactBProcedure, IdentityResolvent, L1Resolvent)
from irsplit.subsolvers import soft_threshold


def quad_l1_setup(n=10, seed=1, nu=0.5):
    """A = subdiff(nu l1), B(x) = x - c0; solution soft(c0, nu) in closed form."""
    rng = np.random.default_rng(seed)
    c0 = 2.0 * rng.standard_normal(n)
    res_a = L1Resolvent(nu)
    b_op = AffineOperator(np.eye(n), -c0)
    res_b = AffineResolvent(b_op)
    x_star = soft_threshold(c0, nu)
    b_star = x_star - c0
    return c0, res_a, b_op, res_b, x_star, b_star


def random_triple(rng, n):
    return SplitTriple(rng.standard_normal(n), rng.standard_normal(n),
                       rng.standard_normal(n))


# ---------------------------------------------------------------------------
# elementary steps
# ---------------------------------------------------------------------------

def test_extrapolate_identity_cases():
    cur = SplitTriple(np.ones(2), 2 * np.ones(2), 3 * np.ones(2))
    hat = dr_extrapolate(cur, cur, 0.4)
    assert np.array_equal(hat.s, cur.s) and np.array_equal(hat.r, cur.r)
    hat0 = dr_extrapolate(cur, random_triple(np.random.default_rng(0), 2), 0.0)
    assert np.array_equal(hat0.b, cur.b)


def test_extrapolate_arithmetic():
    cur = SplitTriple([1.0], [1.0], [1.0])
    prev = SplitTriple([0.0], [0.0], [0.0])
    hat = dr_extrapolate(cur, prev, 0.2)
    for part in (hat.s, hat.b, hat.r):
        assert part[0] == pytest.approx(1.2)


def test_a_step_zero_operator():
    rng = np.random.default_rng(2)
    s, b = rng.standard_normal(5), rng.standard_normal(5)
    r, a = a_step(s, b, 0.7, IdentityResolvent())
    assert np.allclose(r, s - 0.7 * b, atol=0)
    assert np.linalg.norm(a) <= 1e-14


def test_a_step_l1_matches_grid_oracle():
    nu, gamma = 0.8, 1.3
    u = np.array([2.0, -0.4, 0.9])
    r, _ = a_step(u, np.zeros(3), gamma, L1Resolvent(nu))
    grid = np.arange(-4.0, 4.0, 1e-4)
    for i, ui in enumerate(u):
        vals = gamma * nu * np.abs(grid) + 0.5 * (grid - ui) ** 2
        assert abs(r[i] - grid[np.argmin(vals)]) <= 1e-4 + 1e-9


def test_a_step_quadratic_matches_dense_solve():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((6, 6))
    q_mat = m @ m.T + np.eye(6)
    res = AffineResolvent(AffineOperator(q_mat))
    s, b = rng.standard_normal(6), rng.standard_normal(6)
    gamma = 0.6
    r, a = a_step(s, b, gamma, res)
    expected = np.linalg.solve(np.eye(6) + gamma * q_mat, s - gamma * b)
    assert np.linalg.norm(r - expected) <= 1e-12
    # the defining identity of the half-step
    lhs = r + gamma * a
    rhs = s - gamma * b
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1.0 + np.linalg.norm(rhs))


def test_acceptance_exact_pair_and_sigma_zero():
    hat = SplitTriple(np.zeros(2), np.array([0.5, 0.0]), np.array([0.5, 0.0]))
    # s + gamma b equals the center exactly
    s, b = np.array([0.25, 0.0]), np.array([0.75, 0.0])
    assert dr_acceptance(hat, s, b, np.array([0.1, 0.0]), 1.0, 0.0)
    assert not dr_acceptance(hat, s + 0.05, b, np.array([0.1, 0.0]), 1.0, 0.0)


def test_acceptance_matches_engine_verdict_under_embedding():
    # the sigma = 0.5 worked instance of the engine, mapped onto triples
    hat = SplitTriple(np.zeros(2), np.array([0.5, 0.0]), np.array([0.5, 0.0]))
    r_acc = np.array([0.1, 0.0])
    b_acc = np.array([0.5, 0.0])        # z_tilde = r + b = (0.6, 0)
    s_acc = r_acc + np.array([0.5, 0.0])  # v = s - r = (0.5, 0)
    verdict = dr_acceptance(hat, s_acc, b_acc, r_acc, 1.0, 0.5)
    cert = ir.ProxCertificate(np.array([0.6, 0.0]), np.array([0.5, 0.0]), 1.0)
    assert verdict == ir.error_criterion_holds(np.array([1.0, 0.0]), cert, 0.5)
    assert verdict


def test_theta_exact_solve_is_one():
    _, res_a, _, res_b, _, _ = quad_l1_setup()
    rng = np.random.default_rng(4)
    hat = random_triple(rng, 10)
    sol = inner_loop(hat, DRParams(1.0, ir.InertiaRelaxParams.plain()),
                     ExactBProcedure(res_b), res_a)
    assert theta(hat, sol.s, sol.b, sol.r, 1.0) == pytest.approx(1.0, abs=1e-10)


def test_theta_hand_instance():
    hat = SplitTriple(np.zeros(2), np.array([0.5, 0.0]), np.array([0.5, 0.0]))
    r = np.array([-0.2, 0.0])
    b = np.array([0.2, 0.0])   # r + b = 0
    s = r + np.array([0.5, 0.0])
    assert theta(hat, s, b, r, 1.0) == pytest.approx(2.0)


def test_theta_zero_denominator():
    hat = SplitTriple(np.zeros(2), np.zeros(2), np.zeros(2))
    with pytest.raises(ZeroVectorError):
        theta(hat, np.ones(2), np.zeros(2), np.ones(2), 1.0)


def test_update_exact_reduces_to_classical_next_point():
    rng = np.random.default_rng(5)
    hat = random_triple(rng, 4)
    s, r = rng.standard_normal(4), rng.standard_normal(4)
    gamma = 0.9
    nxt = dr_update(hat, s, r, 1.0, 1.0, gamma)
    z_next = nxt.r + gamma * nxt.b
    w = hat.r + gamma * hat.b
    assert np.linalg.norm(z_next - (w - (s - r))) <= 1e-12


def test_update_zero_weight_keeps_center():
    rng = np.random.default_rng(6)
    hat = random_triple(rng, 4)
    s, r = rng.standard_normal(4), rng.standard_normal(4)
    nxt = dr_update(hat, s, r, 0.0, 1.0, 1.0)
    w = hat.r + hat.b
    assert np.linalg.norm(nxt.r + nxt.b - w) <= 1e-12


def test_update_projection_identity():
    # r + gamma b_next = (r_hat + gamma b_hat) + rho theta (r - s)
    rng = np.random.default_rng(7)
    for _ in range(20):
        hat = random_triple(rng, 5)
        s, r = rng.standard_normal(5), rng.standard_normal(5)
        th, rho, gamma = rng.uniform(0.2, 2.0), rng.uniform(0.5, 1.5), \
            rng.uniform(0.3, 2.0)
        nxt = dr_update(hat, s, r, th, rho, gamma)
        lhs = nxt.r + gamma * nxt.b
        rhs = (hat.r + gamma * hat.b) + rho * th * (r - s)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1 + np.linalg.norm(rhs))


# ---------------------------------------------------------------------------
# inner loop
# ---------------------------------------------------------------------------

def test_inner_loop_exact_takes_one_trial():
    _, res_a, _, res_b, _, _ = quad_l1_setup()
    hat = random_triple(np.random.default_rng(8), 10)
    sol = inner_loop(hat, DRParams(1.0, ir.InertiaRelaxParams.plain()),
                     ExactBProcedure(res_b), res_a)
    assert sol.trials == 1


def test_inner_loop_cg_accepts_quickly():
    rng = np.random.default_rng(9)
    m = rng.standard_normal((20, 20))
    q_mat = m @ m.T / 20.0 + np.eye(20)
    bproc = CGBProcedure(q_mat)
    res_a = L1Resolvent(0.3)
    core = ir.InertiaRelaxParams(0.0, 1.0 / 3.0, 0.99, 1.0, 1.0)
    hat = random_triple(rng, 20)
    sol = inner_loop(hat, DRParams(1.0, core), bproc, res_a)
    assert sol.trials <= 10
    assert dr_acceptance(hat, sol.s, sol.b, sol.r, 1.0, 0.99)


def test_inner_loop_sigma_zero_iterative_exhausts_budget():
    rng = np.random.default_rng(10)
    q_mat = np.diag(rng.uniform(1.0, 3.0, size=8))
    bproc = CGBProcedure(q_mat)
    core = ir.InertiaRelaxParams.plain(sigma=0.0)
    hat = random_triple(rng, 8)
    with pytest.raises(BudgetExceeded):
        inner_loop(hat, DRParams(1.0, core, inner_budget=40), bproc,
                   L1Resolvent(0.3))


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

def run_to_budget(*args, **kwargs):
    try:
        return run_dr(*args, **kwargs)
    except BudgetExceeded as exc:
        return exc.state


def test_run_matches_classical_recursion():
    _, res_a, _, res_b, _, _ = quad_l1_setup(n=10, seed=1)
    rng = np.random.default_rng(11)
    init = random_triple(rng, 10)
    params = DRParams(1.0, ir.InertiaRelaxParams.plain(sigma=0.0))
    res = run_to_budget(init, params, ExactBProcedure(res_b), res_a,
                        max_outer=50, keep_trace=True)
    z = init.r + init.b
    worst = 0.0
    for step in res.trace:
        z = classical_dr_step(z, 1.0, res_a, res_b)
        z_run = step.next.r + step.next.b
        worst = max(worst, float(np.max(np.abs(z - z_run))))
    assert len(res.trace) == 50
    assert worst <= 1e-10


def test_run_stationary_init_stops_immediately():
    _, res_a, _, res_b, x_star, b_star = quad_l1_setup(n=6, seed=2)
    init = SplitTriple(x_star, b_star, x_star)
    params = DRParams(1.0, ir.InertiaRelaxParams.plain(sigma=0.0))
    res = run_dr(init, params, ExactBProcedure(res_b), res_a, max_outer=10)
    assert res.status == "solved"
    assert res.outer_iters == 0
    assert np.linalg.norm(res.x - x_star) <= 1e-10


def test_run_inertial_relaxed_converges_and_embeds(inertial_core):
    _, res_a, _, res_b, x_star, b_star = quad_l1_setup(n=10, seed=1)
    params = DRParams(1.0, inertial_core)
    rng = np.random.default_rng(12)
    init = random_triple(rng, 10)
    res = run_dr(init, params, ExactBProcedure(res_b), res_a,
                 max_outer=3000, sr_tolerance=1e-11, keep_trace=True)
    assert res.status == "solved"
    assert np.linalg.norm(res.x - x_star) <= 1e-8
    z_star = x_star + b_star  # gamma = 1
    steps = [(st.hat.r + st.hat.b,
              st.inner.r + st.inner.b,
              st.next.r + st.next.b) for st in res.trace]
    assert ir.fejer_check(steps, z_star, inertial_core, rel_tol=1e-9) is None
    for st in res.trace:
        assert st.theta > 0.0


def test_embedding_reproduces_engine_equations():
    _, res_a, _, res_b, _, _ = quad_l1_setup(n=8, seed=3)
    rng = np.random.default_rng(13)
    q_mat = np.eye(8)  # B(x) = x - c0 has unit quadratic part
    core = ir.InertiaRelaxParams(0.18966, 0.18976, 0.99, 1.4882, 1.4882)
    params = DRParams(1.0, core)
    c0, res_a, _, res_b, _, _ = quad_l1_setup(n=8, seed=3)
    bproc = CGBProcedure(q_mat, -c0)
    init = random_triple(rng, 8)
    # the epsilon stop ends the run before the machine-precision floor,
    # where no trial could pass the relative test any more
    res = run_dr(init, params, bproc, res_a, max_outer=40,
                 sr_tolerance=1e-11, keep_trace=True)
    assert res.status == "solved"
    assert len(res.trace) >= 10
    cur = init
    for st in res.trace:
        z, w, z_tilde, v = embed_to_hpp(cur, st.hat, st.inner.s, st.inner.b,
                                        st.inner.r, 1.0)
        # extrapolation consistency: w = z + alpha (z - z_prev) is implied
        # by the componentwise triple extrapolation; acceptance with lam = 1
        cert = ir.ProxCertificate(z_tilde, v, 1.0)
        assert ir.error_criterion_holds(w, cert, core.sigma)
        # projective correction: z_next = w - rho tau v
        tau = ((w - z_tilde) @ v) / (v @ v)
        z_next = st.next.r + st.next.b
        assert np.linalg.norm(z_next - (w - st.rho_k * tau * v)) <= 1e-12
        cur = st.next


def test_embedding_exact_case_has_unit_tau():
    _, res_a, _, res_b, _, _ = quad_l1_setup(n=5, seed=4)
    rng = np.random.default_rng(14)
    init = random_triple(rng, 5)
    params = DRParams(1.0, ir.InertiaRelaxParams.plain(sigma=0.0))
    res = run_to_budget(init, params, ExactBProcedure(res_b), res_a,
                        max_outer=5, keep_trace=True)
    cur = init
    for st in res.trace:
        _, w, z_tilde, v = embed_to_hpp(cur, st.hat, st.inner.s, st.inner.b,
                                        st.inner.r, 1.0)
        assert np.linalg.norm(v - (st.inner.s - st.inner.r)) == 0.0
        assert np.linalg.norm((w - z_tilde) - v) <= 1e-12
        tau = ((w - z_tilde) @ v) / (v @ v)
        assert tau == pytest.approx(1.0, abs=1e-10)
        cur = st.next


def test_classical_step_zero_operators_is_identity():
    z = np.array([1.0, -2.0, 3.0])
    out = classical_dr_step(z, 1.0, IdentityResolvent(), IdentityResolvent())
    assert np.array_equal(out, z)


def test_classical_fixed_point_solves_inclusion():
    _, res_a, b_op, res_b, x_star, _ = quad_l1_setup(n=7, seed=5, nu=0.4)
    z = np.zeros(7)
    for _ in range(3000):
        z = classical_dr_step(z, 1.0, res_a, res_b)
    x = res_b.apply(1.0, z)
    assert np.linalg.norm(x - x_star) <= 1e-9


def test_resolvent_nonexpansiveness():
    rng = np.random.default_rng(15)
    m = rng.standard_normal((5, 5))
    maps = [L1Resolvent(0.7), AffineResolvent(AffineOperator(m @ m.T))]
    for res in maps:
        for _ in range(50):
            u, up = rng.standard_normal(5), rng.standard_normal(5)
            lhs = np.linalg.norm(res.apply(0.8, u) - res.apply(0.8, up))
            assert lhs <= np.linalg.norm(u - up) * (1.0 + 1e-12)
