"""Proximal-projection engine: elementary steps, runs, descent diagnostics."""

import numpy as np
import pytest

import irsplit as ir
from irsplit.errors import (BudgetExceeded, OracleFailure, ParameterError,
                            ZeroVectorError)
from irsplit.hpp import HPPState, Solution, error_ratio, hpp_iterate
from irsplit.operators import (AffineOperator, ExactResolventOracle,
                               PerturbedResolventOracle,
                               ScaledIdentityOperator)

from conftest import accepted_certificate_sampler


def exact_identity_oracle():
    return ExactResolventOracle(ScaledIdentityOperator(1.0))


def rotation_operator():
    # rotation plus a small symmetric part: monotone, single zero at 0
    return AffineOperator(np.array([[0.1, 1.0], [-1.0, 0.1]]))


# ---------------------------------------------------------------------------
# extrapolate
# ---------------------------------------------------------------------------

def test_extrapolate_no_inertia():
    z = np.array([1.0, -2.0])
    assert np.array_equal(ir.extrapolate(z, np.array([5.0, 5.0]), 0.0), z)


def test_extrapolate_first_iteration():
    z = np.array([1.0, -2.0])
    assert np.array_equal(ir.extrapolate(z, z, 0.7), z)


def test_extrapolate_arithmetic():
    w = ir.extrapolate(np.array([1.0, 0.0]), np.array([0.0, 0.0]), 0.5)
    assert np.allclose(w, [1.5, 0.0], atol=0)


def test_extrapolate_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        ir.extrapolate(np.zeros(2), np.zeros(3), 0.1)


# ---------------------------------------------------------------------------
# acceptance test and bounds
# ---------------------------------------------------------------------------

def test_error_criterion_exact_pair_sigma_zero():
    w = np.array([1.0, 0.5])
    v = np.array([0.25, -0.125])  # dyadic so w - lam v is exact
    cert = ir.ProxCertificate(w - v, v, 1.0)
    assert ir.error_criterion_holds(w, cert, 0.0)


def test_error_criterion_sigma_zero_rejects_residual():
    w = np.array([1.0, 0.0])
    cert = ir.ProxCertificate(np.array([0.5, 0.0]), np.array([0.25, 0.0]), 1.0)
    assert not ir.error_criterion_holds(w, cert, 0.0)


def test_error_criterion_worked_instance():
    w = np.array([1.0, 0.0])
    cert = ir.ProxCertificate(np.array([0.6, 0.0]), np.array([0.5, 0.0]), 1.0)
    assert ir.error_criterion_holds(w, cert, 0.5)
    # LHS = 0.01, RHS = 0.25 (0.16 + 0.25)
    assert error_ratio(w, cert, 0.5) == pytest.approx(0.01 / 0.1025)


def test_gauss_bounds_collapse_at_sigma_zero():
    w = np.array([2.0, -1.0])
    v = np.array([0.5, 0.25])
    cert = ir.ProxCertificate(w - v, v, 1.0)
    assert ir.gauss_bounds_hold(w, cert, 0.0)


def test_gauss_bounds_worked_instance():
    w = np.array([1.0, 0.0])
    cert = ir.ProxCertificate(np.array([0.6, 0.0]), np.array([0.5, 0.0]), 1.0)
    assert ir.gauss_bounds_hold(w, cert, 0.5)


def test_acceptance_implies_gauss_bounds_sampled():
    rng = np.random.default_rng(42)
    sampler = accepted_certificate_sampler(rng)
    for _ in range(2000):
        w, cert, sigma = next(sampler)
        assert ir.gauss_bounds_hold(w, cert, sigma)


def test_zero_v_iff_fixed_point():
    rng = np.random.default_rng(3)
    sampler = accepted_certificate_sampler(rng)
    for _ in range(200):
        w, cert, sigma = next(sampler)
        assert np.any(cert.z_tilde != w)  # v != 0 on these draws
    w = np.array([1.0, 2.0])
    moved = ir.ProxCertificate(np.array([0.9, 2.0]), np.zeros(2), 1.0)
    assert not ir.error_criterion_holds(w, moved, 0.9)
    fixed = ir.ProxCertificate(w.copy(), np.zeros(2), 1.0)
    assert ir.error_criterion_holds(w, fixed, 0.9)


# ---------------------------------------------------------------------------
# relaxed projection
# ---------------------------------------------------------------------------

def test_relaxed_projection_exact_unit_relaxation():
    w = np.array([1.0, 0.5])
    v = np.array([0.25, -0.125])
    cert = ir.ProxCertificate(w - v, v, 1.0)
    z_next = ir.relaxed_projection(w, cert, 1.0)
    assert np.allclose(z_next, cert.z_tilde, atol=1e-15)


def test_relaxed_projection_overrelaxed_instance():
    cert = ir.ProxCertificate(np.array([0.0, 0.0]), np.array([1.0, 0.0]), 1.0)
    z_next = ir.relaxed_projection(np.array([1.0, 0.0]), cert, 1.5)
    assert np.allclose(z_next, [-0.5, 0.0], atol=0)


def test_relaxed_projection_zero_v():
    cert = ir.ProxCertificate(np.zeros(2), np.zeros(2), 1.0)
    with pytest.raises(ZeroVectorError):
        ir.relaxed_projection(np.ones(2), cert, 1.0)


# ---------------------------------------------------------------------------
# single iterations
# ---------------------------------------------------------------------------

def test_iterate_identity_operator_halves():
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    state = HPPState(np.array([1.0]), np.array([1.0]), 0)
    out = hpp_iterate(state, exact_identity_oracle(), params)
    state, diag, _ = out
    assert state.z_cur[0] == pytest.approx(0.5, abs=1e-15)
    assert diag.tau == pytest.approx(1.0)


def test_fifty_iterations_geometric():
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    state = HPPState(np.array([1.0]), np.array([1.0]), 0)
    oracle = exact_identity_oracle()
    for _ in range(50):
        state, _, _ = hpp_iterate(state, oracle, params)
    assert state.z_cur[0] == pytest.approx(2.0 ** -50, rel=1e-12)


def test_iterate_already_solved():
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    state = HPPState(np.zeros(3), np.zeros(3), 0)
    out = hpp_iterate(state, exact_identity_oracle(), params)
    assert isinstance(out, Solution)
    assert np.array_equal(out.z, np.zeros(3))


def test_iterate_rejects_out_of_range_relaxation():
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    state = HPPState(np.ones(2), np.ones(2), 0)
    with pytest.raises(ParameterError):
        hpp_iterate(state, exact_identity_oracle(), params, rho_k=0.0)


def test_iterate_raises_on_bad_certificate():
    class BogusOracle:
        def solve(self, w, lam, sigma):
            return ir.ProxCertificate(w + 10.0, np.ones_like(w), lam)

    params = ir.InertiaRelaxParams.plain(sigma=0.1)
    state = HPPState(np.ones(2), np.ones(2), 0)
    with pytest.raises(OracleFailure):
        hpp_iterate(state, BogusOracle(), params)


def test_unit_relaxation_exact_is_proximal_step():
    # rho = 1 with an exact certificate reproduces z_next = J_lam(w)
    op = rotation_operator()
    oracle = ExactResolventOracle(op)
    params = ir.InertiaRelaxParams.plain(sigma=0.0, lam=0.7)
    rng = np.random.default_rng(0)
    for _ in range(10):
        z = rng.standard_normal(2)
        state = HPPState(z, z.copy(), 0)
        state, _, _ = hpp_iterate(state, oracle, params)
        expected = op.resolvent(0.7, z)
        assert np.linalg.norm(state.z_cur - expected) <= 1e-12


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

def test_run_identity_converges_quickly():
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    res = ir.run_hpp(np.array([1.0]), exact_identity_oracle(), params,
                     max_iters=100, v_tolerance=1e-8)
    assert res.status == "converged"
    assert res.record.outer_iters <= 40


def test_run_budget_zero():
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    with pytest.raises(BudgetExceeded) as excinfo:
        ir.run_hpp(np.array([2.0]), exact_identity_oracle(), params,
                   max_iters=0)
    assert np.array_equal(excinfo.value.state.z, [2.0])


def test_run_rotation_converges_with_fejer():
    oracle = ExactResolventOracle(rotation_operator())
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    res = ir.run_hpp(np.array([3.0, -1.0]), oracle, params, max_iters=2000,
                     v_tolerance=1e-10, keep_trace=True)
    assert res.status == "converged"
    assert np.linalg.norm(res.z) <= 1e-8
    assert ir.fejer_check(res.trace, np.zeros(2), params, rel_tol=0.0) is None


def test_run_inertial_perturbed_descent_and_summability():
    oracle = PerturbedResolventOracle(rotation_operator(), seed=5)
    params = ir.InertiaRelaxParams.from_beta(alpha=0.18, beta=0.18976,
                                             sigma=0.9)
    res = ir.run_hpp(np.array([2.0, 1.0]), oracle, params, max_iters=4000,
                     v_tolerance=1e-9, keep_trace=True)
    assert res.status == "converged"
    z_star = np.zeros(2)
    assert ir.fejer_check(res.trace, z_star, params, rel_tol=1e-9) is None
    assert ir.alvarez_attouch_check(res.trace, np.array([2.0, 1.0]), z_star,
                                    params, rel_tol=1e-9) is None
    increments = [s.diag.increment_sq for s in res.trace]
    assert sum(increments) < 1e3
    assert max(increments[-5:]) <= 1e-12
    for step in res.trace:
        assert step.diag.s_k >= 0.0
        assert step.diag.error_ratio <= 1.0 + 1e-12


def test_stationary_start_is_solution():
    oracle = ExactResolventOracle(rotation_operator())
    params = ir.InertiaRelaxParams.plain(sigma=0.0)
    res = ir.run_hpp(np.zeros(2), oracle, params, max_iters=10)
    assert res.status == "solved"
    assert res.record.outer_iters == 0


def test_alpha_schedule_must_be_nondecreasing():
    oracle = exact_identity_oracle()
    params = ir.InertiaRelaxParams.from_beta(alpha=0.3, beta=1.0 / 3.0,
                                             sigma=0.0)
    with pytest.raises(ParameterError, match="nondecreasing"):
        ir.run_hpp(np.array([1.0]), oracle, params, max_iters=10,
                   alpha_schedule=lambda k: 0.3 - 0.01 * k)
