"""Costly-state-verification contract integrals for a unit-mean lognormal shock.

The idiosyncratic capital-quality shock is lognormal with E[omega] = 1, so
log(omega) ~ N(-sigma^2/2, sigma^2). For a cutoff omega_bar:

* ``cdf``      F  = P(omega < omega_bar), the default probability,
* ``partial``  G  = E[omega; omega < omega_bar],
* ``gross``    Gamma = G + omega_bar (1 - F), the lender's gross share,

and the lender's net share is Gamma - mu G once monitoring costs are paid.
All functions accept scalars or arrays.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

SQRT2PI = np.sqrt(2.0 * np.pi)


def _check(omega_bar, sigma):
    if np.any(np.asarray(omega_bar) <= 0):
        raise ValueError("omega_bar must be positive")
    if np.any(np.asarray(sigma) <= 0):
        raise ValueError("sigma must be positive")


def _z(omega_bar, sigma):
    return (np.log(omega_bar) + 0.5 * sigma**2) / sigma


def cdf(omega_bar, sigma):
    """Default probability F(omega_bar)."""
    _check(omega_bar, sigma)
    return ndtr(_z(omega_bar, sigma))


def pdf(omega_bar, sigma):
    """Lognormal density at the cutoff."""
    _check(omega_bar, sigma)
    z = _z(omega_bar, sigma)
    return np.exp(-0.5 * z**2) / (SQRT2PI * omega_bar * sigma)


def partial_expectation(omega_bar, sigma):
    """G(omega_bar) = integral of omega dF over [0, omega_bar]."""
    _check(omega_bar, sigma)
    return ndtr(_z(omega_bar, sigma) - sigma)


def lender_gross_share(omega_bar, sigma):
    """Gamma(omega_bar) = G + omega_bar (1 - F)."""
    return partial_expectation(omega_bar, sigma) + omega_bar * (1.0 - cdf(omega_bar, sigma))


def gamma_prime(omega_bar, sigma):
    """d Gamma / d omega_bar = 1 - F."""
    return 1.0 - cdf(omega_bar, sigma)


def g_prime(omega_bar, sigma):
    """d G / d omega_bar = omega_bar f(omega_bar)."""
    return omega_bar * pdf(omega_bar, sigma)


def contract_multiplier(omega_bar, sigma, mu):
    """Gamma' / (Gamma' - mu G'), the shadow value on the lender's share."""
    gp = gamma_prime(omega_bar, sigma)
    denom = gp - mu * g_prime(omega_bar, sigma)
    return gp / denom


def contract(omega_bar, sigma, mu):
    """Bundle (Gamma, G, F, Gamma', G') used by the equilibrium conditions."""
    _check(omega_bar, sigma)
    f = cdf(omega_bar, sigma)
    g = partial_expectation(omega_bar, sigma)
    gamma = g + omega_bar * (1.0 - f)
    return {
        "gamma": gamma,
        "g": g,
        "f": f,
        "gamma_prime": 1.0 - f,
        "g_prime": omega_bar * pdf(omega_bar, sigma),
        "lender_net": gamma - mu * g,
    }
