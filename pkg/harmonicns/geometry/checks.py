"""Sampled property checks of the closed-form geometry."""
import logging

import numpy as np

from harmonicns.core import constants
from harmonicns.geometry import hyperbolic

logger = logging.getLogger(__name__)

# Sample window of the disk/strip warp comparison.
STRIP_WARP_R = 5.
STRIP_WARP_GAP = 1e-3


def _disk_samples(n, rng, radius=0.9, x_min=0.05):
    z = np.empty(0, dtype=complex)
    while z.size < n:
        rho = radius*np.sqrt(rng.uniform(0., 1., n))
        alpha = rng.uniform(-constants.HALF_PI, constants.HALF_PI, n)
        batch = rho*np.exp(1j*alpha)
        z = np.concatenate([z, batch[batch.real > x_min]])
    return z[:n]


def _check(name, value, tolerance):
    return {"name": name, "value": float(value), "tolerance": float(tolerance),
            "passed": bool(value <= tolerance)}


def inverse_pair(z):
    """Largest ``|phi(psi(z)) - z|``."""
    return np.max(abs(hyperbolic.phi(hyperbolic.psi(z)) - z))


def psi_prime_difference(z, h=2e-4):
    """Largest relative gap between ``psi'`` and a fourth-order difference of psi."""
    difference = (-hyperbolic.psi(z + 2*h) + 8*hyperbolic.psi(z + h)
                  - 8*hyperbolic.psi(z - h) + hyperbolic.psi(z - 2*h))/(12*h)
    exact = hyperbolic.psi_prime(z)
    return np.max(abs(difference - exact)/abs(exact))


def psi_second_bound(z):
    """Largest ``|psi''| - |psi'|^2``; nonpositive when the bound holds."""
    return np.max(abs(hyperbolic.psi_second(z)) - abs(hyperbolic.psi_prime(z))**2)


def strip_warp(rng, n):
    """Largest ``|f(phi(w)) - f_strip(s)|/max(1, f_strip)`` on the warp window.

    The window is ``|r| <= STRIP_WARP_R`` and ``s <= pi/2 - STRIP_WARP_GAP``.
    Beyond it ``1 - |phi(w)|^2`` drops below about 1e-5 and the disk form
    loses digits to cancellation, so the two forms agree only to roundoff
    relative to f, which grows like ``(pi/2 - s)^-1/2``.

    """
    r = rng.uniform(-STRIP_WARP_R, STRIP_WARP_R, n)
    s = rng.uniform(0., constants.HALF_PI - STRIP_WARP_GAP, n)
    z = hyperbolic.phi(r + 1j*s)
    z = z.real.clip(0.) + 1j*z.imag
    strip = hyperbolic.warp_f_strip(s)
    return np.max(abs(hyperbolic.warp_f(z) - strip)/np.maximum(1., strip))


def log_derivative(h=1e-4, count=1000):
    """Largest gap between G and a sixth-order difference of log f_strip."""
    s = np.linspace(0.05, constants.HALF_PI - 0.05, count)

    def log_f(x):
        return np.log(hyperbolic.warp_f_strip(x))

    weights = {1: 45., 2: -9., 3: 1.}
    difference = sum(w*(log_f(s + k*h) - log_f(s - k*h)) for k, w in weights.items())
    return np.max(abs(difference/(60*h) - hyperbolic.coefficient_G(s)))


def g_lower_bound(count=1000):
    """Largest ``(1 + 1/(2cos s))/2 - G(s)`` on (sqrt(2)/2, pi/2)."""
    s = np.linspace(np.sqrt(2)/2, constants.HALF_PI, count + 2)[1:-1]
    return np.max(0.5*(1 + 0.5/np.cos(s)) - hyperbolic.coefficient_G(s))


def christoffel_difference(z, jet_factory=hyperbolic.geometry_jet, step=1e-5):
    """Largest relative gap between closed-form and differenced Christoffels.

    Gaps are measured against the largest closed-form entry at each point.

    """
    closed = jet_factory(z).christoffel()
    numeric = hyperbolic.christoffel_from_metric(hyperbolic.metric_diagonal,
                                                 z.real, z.imag, step)
    scale = np.max(abs(closed).reshape(27, -1), axis=0)
    return np.max(np.max(abs(closed - numeric).reshape(27, -1), axis=0)/scale)


def coframe_norms(z, jet_factory=hyperbolic.geometry_jet):
    """Largest relative error of ``||dx|| = 1 - |z|^2`` and ``||dtheta|| = 1/f``."""
    jet = jet_factory(z)
    inverse = jet.inverse_metric
    dx = abs(np.sqrt(inverse[0]) - (1 - abs(z)**2))/(1 - abs(z)**2)
    dtheta = abs(np.sqrt(inverse[2]) - 1/jet.f)*jet.f
    return max(np.max(dx), np.max(dtheta))


def expanded_form(z):
    """Largest relative gap between ``warp_f`` and its expanded form."""
    f = hyperbolic.warp_f(z)
    return np.max(abs(f - hyperbolic.warp_f_expanded(z))/np.maximum(1., f))


def bound_chain(z):
    """Largest violation of the two bounds making the integral of f finite."""
    first, f, bound = hyperbolic.warp_bound_chain(z)
    return max(np.max(first - 0.5), np.max(f - bound))


def geometry_checks(n=constants.DEFAULT_BOUND_SAMPLES, seed=constants.DEFAULT_SEED,
                    jet_factory=hyperbolic.geometry_jet):
    """Run every geometry property on ``n`` samples.

    Args:
        n (int): Sample count.
        seed (int): Random seed.
        jet_factory (callable): Builds the ``GeometryJet`` under test.

    Returns:
        list[dict]: One entry per property with ``name``, ``value``,
        ``tolerance`` and ``passed``.

    """
    rng = np.random.default_rng(seed)
    z = _disk_samples(n, rng)
    checks = [
        _check("inverse_pair", inverse_pair(z), 1e-12),
        _check("psi_prime_difference", psi_prime_difference(z), 1e-8),
        _check("psi_second_bound", psi_second_bound(z), 0.),
        _check("strip_warp", strip_warp(rng, n), 1e-10),
        _check("log_derivative", log_derivative(), 1e-7),
        _check("g_lower_bound", g_lower_bound(), 0.),
        _check("christoffel", christoffel_difference(z, jet_factory), 1e-6),
        _check("coframe_norms", coframe_norms(z, jet_factory), 1e-14),
        _check("expanded_form", expanded_form(z), 1e-12),
        _check("bound_chain", bound_chain(z), 0.),
    ]
    for check in checks:
        if not check["passed"]:
            logger.warning("Geometry check %s failed: %.3e > %.1e",
                           check["name"], check["value"], check["tolerance"])
    return checks
