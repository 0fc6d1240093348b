"""Shared fixtures: small seeded instances and cached high-accuracy references."""

import numpy as np
import pytest

import irsplit as ir


@pytest.fixture(scope="session")
def lasso_20x50():
    return ir.synthetic_lasso(20, 50, seed=7)


@pytest.fixture(scope="session")
def lasso_20x50_reference(lasso_20x50):
    return ir.reference_minimizer(lasso_20x50, tol=1e-10)


@pytest.fixture(scope="session")
def inertial_core():
    """The coupled inertial-relaxed setting used throughout the LASSO runs."""
    return ir.InertiaRelaxParams(0.18966, 0.18976, 0.99, 1.4882, 1.4882)


@pytest.fixture(scope="session")
def plain_core_sigma99():
    return ir.InertiaRelaxParams(0.0, 1.0 / 3.0, 0.99, 1.0, 1.0)


def accepted_certificate_sampler(rng, dim=4):
    """Yield (w, cert, sigma) triples that pass the relative-error test.

    Draws an exact resolvent pair, perturbs the point, re-derives a
    consistent v, and keeps the draw only when the acceptance test holds.
    """
    while True:
        w = rng.standard_normal(dim) * rng.uniform(0.5, 3.0)
        lam = rng.uniform(0.3, 3.0)
        sigma = rng.uniform(0.05, 0.99)
        mu = rng.uniform(0.2, 2.0)
        z_exact = w / (1.0 + lam * mu)  # resolvent of T(z) = mu z
        scale = np.linalg.norm(w - z_exact) + 1e-3
        z_tilde = z_exact + rng.standard_normal(dim) * scale * rng.uniform(0, 0.4)
        v = mu * z_tilde  # v in T(z_tilde) exactly
        cert = ir.ProxCertificate(z_tilde, v, lam)
        if np.any(v) and ir.error_criterion_holds(w, cert, sigma):
            yield w, cert, sigma
