"""Inertial-relaxed hybrid proximal-projection (HPP) engine.

Solves the monotone inclusion ``0 in T(z)`` given only an inexact resolvent
oracle for ``T``.  Each iteration extrapolates the two most recent iterates
(inertia), asks the oracle for an approximate resolvent pair passing a
relative-error test, and applies a relaxed orthogonal projection onto the
hyperplane that separates the extrapolated point from the solution set.

The admissible inertia and relaxation caps are mutually constrained: for an
inertia bound ``beta`` the relaxation cap is ``rho_bar_of_beta(beta)`` and
conversely ``beta_of_rho_bar`` recovers ``beta``.  ``validate_params``
enforces the full contract.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .errors import BudgetExceeded, OracleFailure, ParameterError, ZeroVectorError
from .records import BUDGET_EXCEEDED, CONVERGED, RunRecord

__all__ = [
    "rho_bar_of_beta",
    "beta_of_rho_bar",
    "q_eval",
    "smallest_positive_root",
    "InertiaRelaxParams",
    "validate_params",
    "ProxCertificate",
    "ResolventOracle",
    "HPPState",
    "IterationDiagnostics",
    "Solution",
    "extrapolate",
    "error_criterion_holds",
    "error_ratio",
    "gauss_bounds_hold",
    "relaxed_projection",
    "hpp_iterate",
    "HPPStep",
    "HPPResult",
    "run_hpp",
    "fejer_check",
    "alvarez_attouch_check",
]

def _vec(x, name="vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        v = np.atleast_1d(v.ravel())
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def _same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


# ---------------------------------------------------------------------------
# Scalar coupling between the inertia cap and the relaxation cap
# ---------------------------------------------------------------------------

def rho_bar_of_beta(beta: float) -> float:
    """Relaxation cap admissible for inertia bound ``beta``.

    Strictly decreasing from 2 (beta -> 0) to 0 (beta -> 1), with value 1
    at beta = 1/3.
    """
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    t = 2.0 * (beta - 1.0) ** 2
    return t / (t + 3.0 * beta - 1.0)


def beta_of_rho_bar(rho_bar: float) -> float:
    """Inertia bound paired with relaxation cap ``rho_bar`` (inverse map)."""
    if not 0.0 < rho_bar < 2.0:
        raise ParameterError(f"rho_bar must lie in (0, 2), got {rho_bar}")
    return 2.0 * (2.0 - rho_bar) / (
        4.0 - rho_bar + math.sqrt(rho_bar * (16.0 - 7.0 * rho_bar))
    )


def q_eval(nu: float, rho_bar: float) -> float:
    """Quadratic whose positive root is ``beta_of_rho_bar(rho_bar)``.

    q(nu) = 2(1/rho_bar - 1) nu^2 - (4/rho_bar - 1) nu + 2/rho_bar - 1.
    Positive on [0, beta) and decreasing on [0, beta].
    """
    if not 0.0 < rho_bar < 2.0:
        raise ParameterError(f"rho_bar must lie in (0, 2), got {rho_bar}")
    ri = 1.0 / rho_bar
    return 2.0 * (ri - 1.0) * nu * nu - (4.0 * ri - 1.0) * nu + (2.0 * ri - 1.0)


def smallest_positive_root(a: float, b: float, c: float) -> float:
    """Smallest positive root of ``a x^2 - b x + c`` with b, c > 0.

    Uses the rationalized form 2c / (b + sqrt(b^2 - 4ac)), which covers the
    affine case a = 0 and both signs of ``a`` without branching: for a > 0
    it is the smaller root, for a < 0 it is the unique positive (larger)
    root.
    """
    if b <= 0.0 or c <= 0.0:
        raise ParameterError("requires b > 0 and c > 0")
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        raise ParameterError("requires b^2 - 4ac > 0")
    return 2.0 * c / (b + math.sqrt(disc))


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InertiaRelaxParams:
    """Inertia / relaxation / error-tolerance parameters of the engine.

    Contract: 0 <= alpha < beta < 1, 0 <= sigma < 1, 0 < rho_lo <= rho_hi
    < 2, lam > 0, and the coupling alpha < beta_of_rho_bar(rho_hi) -- i.e.
    some admissible inertia bound above alpha pairs with the requested
    relaxation cap.  ``lam`` is the constant proximal stepsize; the
    splitting layers built on top force lam = 1.
    """

    alpha: float
    beta: float
    sigma: float
    rho_lo: float
    rho_hi: float
    lam: float = 1.0

    @classmethod
    def from_beta(cls, alpha: float, beta: float, sigma: float = 0.99,
                  lam: float = 1.0) -> "InertiaRelaxParams":
        """Pair ``beta`` with its maximal admissible relaxation."""
        rho = rho_bar_of_beta(beta)
        return cls(alpha=alpha, beta=beta, sigma=sigma,
                   rho_lo=rho, rho_hi=rho, lam=lam)

    @classmethod
    def plain(cls, sigma: float = 0.0, lam: float = 1.0) -> "InertiaRelaxParams":
        """No inertia, unit relaxation: the classical projective setup."""
        return cls(alpha=0.0, beta=1.0 / 3.0, sigma=sigma,
                   rho_lo=1.0, rho_hi=1.0, lam=lam)


def validate_params(p: InertiaRelaxParams) -> None:
    """Raise ``ParameterError`` naming the first violated inequality."""
    vals = (p.alpha, p.beta, p.sigma, p.rho_lo, p.rho_hi, p.lam)
    if not all(math.isfinite(v) for v in vals):
        raise ParameterError("parameters must be finite")
    if p.alpha < 0.0:
        raise ParameterError("0 <= alpha violated")
    if not p.alpha < p.beta:
        raise ParameterError("alpha < beta violated")
    if not p.beta < 1.0:
        raise ParameterError("beta < 1 violated")
    if not 0.0 <= p.sigma < 1.0:
        raise ParameterError("0 <= sigma < 1 violated")
    if not p.rho_lo > 0.0:
        raise ParameterError("rho_lo > 0 violated")
    if not p.rho_lo <= p.rho_hi:
        raise ParameterError("rho_lo <= rho_hi violated")
    if not p.rho_hi < 2.0:
        raise ParameterError("rho_hi < 2 violated")
    if not p.alpha < beta_of_rho_bar(p.rho_hi):
        raise ParameterError("coupling alpha < beta_of_rho_bar(rho_hi) violated")
    if not p.lam > 0.0:
        raise ParameterError("lam > 0 violated")


# ---------------------------------------------------------------------------
# Certificates and the oracle interface
# ---------------------------------------------------------------------------

@dataclass
class ProxCertificate:
    """Output of one inexact resolvent solve: ``v in T(z_tilde)``, stepsize lam.

    ``exact=True`` asserts that the producer solved the proximal equation
    exactly by construction (z_tilde = w - lam v), which makes the
    relative-error test vacuous; this is how a sigma = 0 run is realized in
    floating point.
    """

    z_tilde: np.ndarray
    v: np.ndarray
    lam: float
    exact: bool = False

    def __post_init__(self):
        self.z_tilde = _vec(self.z_tilde, "z_tilde")
        self.v = _vec(self.v, "v")
        _same_shape(self.z_tilde, self.v)
        if not self.lam > 0.0:
            raise ParameterError("certificate stepsize lam must be positive")


class ResolventOracle(Protocol):
    """Inexact resolvent capability for a maximal monotone operator.

    ``solve(w, lam, sigma)`` returns a certificate whose pair satisfies the
    producer contract v in T(z_tilde) and, unless ``exact``, the
    relative-error acceptance test at tolerance sigma against ``w``.
    A certificate with v = 0 announces that z_tilde solves the inclusion.
    """

    def solve(self, w: np.ndarray, lam: float, sigma: float) -> ProxCertificate:
        ...


@dataclass
class HPPState:
    """Current and previous iterate; at k = 0 both coincide."""

    z_cur: np.ndarray
    z_prev: np.ndarray
    k: int = 0

    def __post_init__(self):
        self.z_cur = _vec(self.z_cur, "z_cur")
        self.z_prev = _vec(self.z_prev, "z_prev")
        _same_shape(self.z_cur, self.z_prev)
        if self.k == 0 and not np.array_equal(self.z_cur, self.z_prev):
            raise ValueError("at k = 0 the two iterates must coincide")


@dataclass
class IterationDiagnostics:
    """Per-iteration quantities used by the descent and summability checks.

    ``s_k`` is the nonnegative slack of the Fejer-type inequality for the
    step just taken (it involves the *next* iterate), ``increment_sq`` the
    squared step between the two iterates at entry, ``delta_k`` the inertial
    by-product alpha_k (1 + alpha_k) increment_sq.
    """

    w: np.ndarray
    tau: float
    s_k: float
    error_ratio: float
    increment_sq: float
    delta_k: float


@dataclass
class Solution:
    """Exact zero of the operator discovered by the oracle (v = 0)."""

    z: np.ndarray


# ---------------------------------------------------------------------------
# Elementary operations
# ---------------------------------------------------------------------------

def extrapolate(z_cur: np.ndarray, z_prev: np.ndarray, alpha_k: float) -> np.ndarray:
    """Inertial extrapolation w = z_cur + alpha_k (z_cur - z_prev)."""
    _same_shape(z_cur, z_prev)
    if alpha_k < 0.0:
        raise ParameterError("alpha_k must be nonnegative")
    return z_cur + alpha_k * (z_cur - z_prev)


def error_criterion_holds(w: np.ndarray, cert: ProxCertificate, sigma: float) -> bool:
    """Relative-error acceptance test.

    True iff ||lam v + z_tilde - w||^2 <= sigma^2 (||z_tilde - w||^2
    + ||lam v||^2).  The left side is evaluated as lam*v - (w - z_tilde) so
    that an exactly constructed pair cancels cleanly.
    """
    _same_shape(w, cert.z_tilde)
    lv = cert.lam * cert.v
    resid = lv - (w - cert.z_tilde)
    dz = cert.z_tilde - w
    return resid @ resid <= sigma * sigma * (dz @ dz + lv @ lv)


def error_ratio(w: np.ndarray, cert: ProxCertificate, sigma: float) -> float:
    """LHS / RHS of the acceptance test; <= 1 on accepted certificates."""
    lv = cert.lam * cert.v
    resid = lv - (w - cert.z_tilde)
    dz = cert.z_tilde - w
    lhs = resid @ resid
    rhs = sigma * sigma * (dz @ dz + lv @ lv)
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    return lhs / rhs


def gauss_bounds_hold(w: np.ndarray, cert: ProxCertificate, sigma: float) -> bool:
    """Two-sided bound tying ||lam v|| to ||z_tilde - w|| on accepted pairs.

    (1-s^2)/(1+sqrt(1-(1-s^2)^2)) ||z_tilde-w|| <= ||lam v||
    <= (1-s^2)/(1-sqrt(1-(1-s^2)^2)) ||z_tilde-w||, s = sigma.  At sigma = 0
    both coefficients equal 1 and the bound collapses to equality.  Allows a
    1e-12 relative round-off slack.
    """
    u = sigma * sigma
    root = math.sqrt(u * (2.0 - u))  # = sqrt(1 - (1 - sigma^2)^2)
    lo = (1.0 - u) / (1.0 + root)
    hi = (1.0 - u) / (1.0 - root)
    dz = float(np.linalg.norm(cert.z_tilde - w))
    lv = float(np.linalg.norm(cert.lam * cert.v))
    slack = 1e-12
    return (lo * dz <= lv * (1.0 + slack) + slack and
            lv <= hi * dz * (1.0 + slack) + slack)


def relaxed_projection(w: np.ndarray, cert: ProxCertificate, rho_k: float) -> np.ndarray:
    """Relaxed projection of ``w`` onto the separating hyperplane.

    Returns w - rho_k * (<w - z_tilde, v> / ||v||^2) v; with rho_k = 1 this
    is the orthogonal projection onto {z : <z, v> = <z_tilde, v>}.
    """
    _same_shape(w, cert.z_tilde)
    vv = cert.v @ cert.v
    if vv == 0.0:
        raise ZeroVectorError("v = 0: z_tilde already solves the inclusion")
    tau = ((w - cert.z_tilde) @ cert.v) / vv
    return w - (rho_k * tau) * cert.v


# ---------------------------------------------------------------------------
# One iteration and the driver
# ---------------------------------------------------------------------------

def _s_bound(z_next, w, z_tilde, params) -> float:
    """Fejer slack for the step producing ``z_next`` from hat point ``w``."""
    dzw = z_next - w
    dtw = z_tilde - w
    one_minus = (1.0 - params.sigma ** 2) ** 2
    return (2.0 - params.rho_hi) * max(
        (dzw @ dzw) / params.rho_hi,
        params.rho_lo * one_minus * (dtw @ dtw),
    )


def hpp_iterate(state: HPPState, oracle: ResolventOracle,
                params: InertiaRelaxParams, alpha_k: Optional[float] = None,
                rho_k: Optional[float] = None):
    """One engine step: extrapolate, certify, project.

    Returns ``(next_state, diagnostics, accepted_certificate)`` or
    ``Solution`` when the oracle reports v = 0.  Raises ``OracleFailure``
    if the returned certificate fails the acceptance test.
    """
    alpha_k = params.alpha if alpha_k is None else alpha_k
    rho_k = params.rho_hi if rho_k is None else rho_k
    if not 0.0 <= alpha_k <= params.alpha:
        raise ParameterError(f"alpha_k = {alpha_k} outside [0, alpha]")
    if not params.rho_lo <= rho_k <= params.rho_hi:
        raise ParameterError(f"rho_k = {rho_k} outside [rho_lo, rho_hi]")

    w = extrapolate(state.z_cur, state.z_prev, alpha_k)
    cert = oracle.solve(w, params.lam, params.sigma)
    if not np.any(cert.v):
        return Solution(cert.z_tilde)
    if not (cert.exact or error_criterion_holds(w, cert, params.sigma)):
        raise OracleFailure("certificate fails the relative-error test")

    vv = cert.v @ cert.v
    tau = ((w - cert.z_tilde) @ cert.v) / vv
    z_next = w - (rho_k * tau) * cert.v

    inc = state.z_cur - state.z_prev
    inc_sq = float(inc @ inc)
    diag = IterationDiagnostics(
        w=w,
        tau=float(tau),
        s_k=float(_s_bound(z_next, w, cert.z_tilde, params)),
        error_ratio=error_ratio(w, cert, params.sigma),
        increment_sq=inc_sq,
        delta_k=alpha_k * (1.0 + alpha_k) * inc_sq,
    )
    new_state = HPPState(z_next, state.z_cur.copy(), state.k + 1)
    return new_state, diag, cert


@dataclass
class HPPStep:
    """One recorded engine step (for descent / embedding checks)."""

    w: np.ndarray
    z_tilde: np.ndarray
    v: np.ndarray
    z_next: np.ndarray
    alpha_k: float
    rho_k: float
    diag: IterationDiagnostics


@dataclass
class HPPResult:
    z: np.ndarray
    status: str
    v_norm: float
    record: RunRecord
    trace: Optional[list] = None


def run_hpp(z0, oracle: ResolventOracle, params: InertiaRelaxParams,
            max_iters: int = 1000, v_tolerance: float = 0.0,
            alpha_schedule: Optional[Callable[[int], float]] = None,
            keep_trace: bool = False) -> HPPResult:
    """Drive the engine from ``z0`` until v = 0, ||v|| <= v_tolerance or budget.

    The default schedule is constant alpha_k = alpha and rho_k = rho_hi.  A
    per-step ``alpha_schedule(k)`` must be nondecreasing; this is checked.
    Raises ``BudgetExceeded`` (carrying the partial result in ``state``)
    when ``max_iters`` runs out.
    """
    validate_params(params)
    z0 = _vec(z0, "z0")
    state = HPPState(z0, z0.copy(), 0)
    trace: list = []
    started = time.perf_counter()
    last_alpha = 0.0
    for k in range(max_iters):
        alpha_k = params.alpha if alpha_schedule is None else float(alpha_schedule(k))
        if alpha_k < last_alpha:
            raise ParameterError("alpha_k schedule must be nondecreasing")
        last_alpha = alpha_k
        out = hpp_iterate(state, oracle, params, alpha_k=alpha_k)
        if isinstance(out, Solution):
            rec = RunRecord(k, 0, time.perf_counter() - started, 0.0,
                            math.nan, CONVERGED)
            return HPPResult(out.z, "solved", 0.0, rec, trace if keep_trace else None)
        new_state, diag, cert = out
        if keep_trace:
            trace.append(HPPStep(diag.w, cert.z_tilde, cert.v,
                                 new_state.z_cur, alpha_k, params.rho_hi, diag))
        state = new_state
        v_norm = float(np.linalg.norm(cert.v))
        if v_norm <= v_tolerance:
            rec = RunRecord(k + 1, 0, time.perf_counter() - started, v_norm,
                            math.nan, CONVERGED)
            return HPPResult(state.z_cur, "converged", v_norm, rec,
                             trace if keep_trace else None)
    raise BudgetExceeded(f"no convergence within {max_iters} iterations",
                         state=HPPResult(state.z_cur, BUDGET_EXCEEDED, math.inf,
                                         RunRecord(max_iters, 0,
                                                   time.perf_counter() - started,
                                                   math.inf, math.nan,
                                                   BUDGET_EXCEEDED),
                                         trace if keep_trace else None))


# ---------------------------------------------------------------------------
# Trajectory diagnostics
# ---------------------------------------------------------------------------

def fejer_check(steps: Sequence, z_star, params: InertiaRelaxParams,
                rel_tol: float = 1e-9) -> Optional[int]:
    """First index violating the per-step Fejer-type inequality, else None.

    Each step must expose (w, z_tilde, z_next) either as attributes or as a
    tuple; the slack term is recomputed from the parameters.  The test is
    ||z_next - z*||^2 + s <= ||w - z*||^2 (1 + rel_tol).
    """
    z_star = _vec(z_star, "z_star")
    for idx, step in enumerate(steps):
        if hasattr(step, "w"):
            w, z_tilde, z_next = step.w, step.z_tilde, step.z_next
        else:
            w, z_tilde, z_next = step[0], step[1], step[2]
        s = _s_bound(z_next, w, z_tilde, params)
        dzn = z_next - z_star
        dw = w - z_star
        lhs = dzn @ dzn + s
        rhs = dw @ dw
        if lhs > rhs * (1.0 + rel_tol):
            return idx
    return None


def alvarez_attouch_check(trace: Sequence[HPPStep], z0, z_star,
                          params: InertiaRelaxParams,
                          rel_tol: float = 1e-9) -> Optional[int]:
    """First index violating the inertial partial-sum bound, else None.

    Checks phi_k + sum_{j<=k} s_j <= phi_0 + (1 - alpha)^{-1} sum_{j<k}
    delta_j along a recorded trajectory, with phi_k = ||z^k - z*||^2.
    """
    z0 = _vec(z0, "z0")
    z_star = _vec(z_star, "z_star")
    phi0 = float((z0 - z_star) @ (z0 - z_star))
    s_sum = 0.0
    delta_sum = 0.0
    scale = 1.0 / (1.0 - params.alpha)
    for idx, step in enumerate(trace):
        s_sum += step.diag.s_k
        dz = step.z_next - z_star
        lhs = float(dz @ dz) + s_sum
        rhs = phi0 + scale * (delta_sum + step.diag.delta_k)
        if lhs > rhs * (1.0 + rel_tol) + rel_tol:
            return idx
        delta_sum += step.diag.delta_k
    return None
