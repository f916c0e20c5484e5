"""Closed-form geometry of the warped product H x_f S^1.

The base H is the right half of the unit disk with the hyperbolic metric of
curvature -4, ``(dx^2 + dy^2)/(1 - |z|^2)^2``, and the circle fiber is scaled by
the warping function ``f = sinh(rho)``, with ``rho`` the hyperbolic distance to
the segment L = {x = 0}. The conformal maps ``phi`` and ``psi`` identify H with
the strip 0 < Im w < pi/2, on which ``f`` depends on ``s = Im w`` only.

All functions accept scalars or numpy arrays and are vectorized.

"""
import dataclasses
import logging

import numpy as np

from harmonicns.core import constants
from harmonicns.core.errors import DomainError, RangeError

logger = logging.getLogger(__name__)

# Index order of the stored Christoffel coefficients.
COEFFICIENT_ORDER = ("xx", "xy", "yx", "yy", "tt")


def _unwrap(array):
    """Return numpy scalars for 0-d arrays, arrays otherwise."""
    return array[()] if np.ndim(array) == 0 else array


@dataclasses.dataclass(frozen=True)
class DiskPoint:
    """A point z = x + iy of the closed half-disk H u L.

    Args:
        x (float): Real coordinate.
        y (float): Imaginary coordinate.

    """

    x: float
    y: float

    @property
    def z(self):
        """complex: The point as a complex number."""
        return complex(self.x, self.y)

    @property
    def on_axis(self):
        """bool: Whether the point lies on the segment L."""
        return self.x == 0.

    def validate(self):
        """Raise ``DomainError`` unless the point lies in H u L."""
        if self.x < 0. or self.x**2 + self.y**2 >= 1.:
            raise DomainError(f"{self.z} is not in the closed half-disk")
        return self


@dataclasses.dataclass(frozen=True)
class StripPoint:
    """A point w = r + is of the closed strip 0 <= s <= pi/2.

    Args:
        r (float): Real coordinate.
        s (float): Imaginary coordinate in radians.

    """

    r: float
    s: float

    @property
    def w(self):
        """complex: The point as a complex number."""
        return complex(self.r, self.s)

    def validate(self):
        """Raise ``RangeError`` unless the point lies in the closed strip."""
        if not np.isfinite(self.r) or not 0. <= self.s <= constants.HALF_PI:
            raise RangeError(f"{self.w} is not in the closed strip")
        return self


def phi(w):
    """Map the strip onto the half-disk.

    Args:
        w (complex or np.ndarray): Points of the closed strip.

    Returns:
        complex or np.ndarray: ``i(e^-w - 1)/(e^-w + 1)``.

    """
    w = np.asarray(w, dtype=complex)
    # Equal to -i*tanh(w/2), which stays finite for large |Re w|.
    return _unwrap(-1j*np.tanh(w/2))


def _check_corners(z):
    distance = np.minimum(abs(z - 1j), abs(z + 1j))
    if np.any(distance == 0.):
        raise DomainError("psi is singular at z = +-i")


def psi(z):
    """Map the unit disk onto the strip -pi/2 < Im w < pi/2.

    The half-disk H is sent onto 0 < Im w < pi/2 and L onto the real axis.

    Args:
        z (complex or np.ndarray): Points of the closed unit disk, not +-i.

    Returns:
        complex or np.ndarray: ``log((i - z)/(i + z))``.

    Raises:
        DomainError: If any point is +-i or lies outside the closed disk.

    """
    z = np.asarray(z, dtype=complex)
    _check_corners(z)
    if np.any(abs(z) > 1. + 1e-12):
        raise DomainError("psi is only used on the closed unit disk")
    return _unwrap(np.log((1j - z)/(1j + z)))


def psi_prime(z):
    """Complex derivative of ``psi``: ``2i/(1 + z^2)``."""
    z = np.asarray(z, dtype=complex)
    _check_corners(z)
    return _unwrap(2j/(1 + z*z))


def psi_second(z):
    """Second complex derivative of ``psi``: ``-4iz/(1 + z^2)^2``."""
    z = np.asarray(z, dtype=complex)
    _check_corners(z)
    return _unwrap(-4j*z/(1 + z*z)**2)


def psi_prime_on_strip(w):
    """``psi'(phi(w))`` written on the strip: ``i(1 + cosh w)``."""
    w = np.asarray(w, dtype=complex)
    return _unwrap(1j*(1 + np.cosh(w)))


def disk_defect_on_strip(w):
    """``1 - |phi(w)|^2`` written on the strip: ``2cos(s)/(cosh(r) + cos(s))``.

    Stays accurate where ``phi(w)`` approaches the corners +-i.

    """
    w = np.asarray(w, dtype=complex)
    r, s = w.real, w.imag
    return _unwrap(2*np.cos(s)/(np.cosh(r) + np.cos(s)))


def _disk_arrays(z):
    z = np.asarray(z, dtype=complex)
    if np.any(abs(z) >= 1.):
        raise DomainError("the warping function is only defined for |z| < 1")
    if np.any(z.real < 0.):
        raise DomainError("the warping function is only defined for x >= 0")
    return z, 1 - abs(z)**2


def distance_ratio(z):
    """``t = 2x/(1 - |z|^2)``, so that the distance to L is arcsinh(t)/2."""
    z, defect = _disk_arrays(z)
    return _unwrap(2*z.real/defect)


def warp_f(z):
    """The warping function ``f = sinh(rho)`` on H u L.

    Args:
        z (complex or np.ndarray): Points with x >= 0 and |z| < 1.

    Returns:
        float or np.ndarray: Nonnegative values, zero exactly on L.

    Raises:
        DomainError: If any point has |z| >= 1 or x < 0.

    """
    t = np.asarray(distance_ratio(z))
    return _unwrap(np.sinh(np.arcsinh(t)/constants.CURVATURE_A))


def warp_f_expanded(z):
    """The warping function in its expanded algebraic form.

    With ``q = t + sqrt(1 + t^2)`` this is ``-q^(-1/2)/2 + q^(1/2)/2``.

    """
    t = np.asarray(distance_ratio(z))
    q = t + np.sqrt(1 + t*t)
    return _unwrap(-0.5*q**-0.5 + 0.5*q**0.5)


def warp_gradient(z):
    """Partial derivatives ``(f_x, f_y)`` of the warping function."""
    z, defect = _disk_arrays(z)
    x, y = z.real, z.imag
    t = 2*x/defect
    dfdt = 0.5*np.cosh(np.arcsinh(t)/2)/np.sqrt(1 + t*t)
    t_x = 2/defect + 4*x*x/defect**2
    t_y = 4*x*y/defect**2
    return _unwrap(dfdt*t_x), _unwrap(dfdt*t_y)


def warp_bound_chain(z):
    """Terms of the bound chain that makes the integral of f over H finite.

    Returns:
        tuple[np.ndarray]: ``(first, f, bound)``: the absolute value of the
        first expanded term (never above 1/2), the warping function and the
        majorant ``1/2 + (sqrt(4x/(1 - |z|^2)) + 1)/2``.

    """
    z, defect = _disk_arrays(z)
    t = 2*z.real/defect
    q = t + np.sqrt(1 + t*t)
    first = 0.5*q**-0.5
    bound = 0.5 + 0.5*(np.sqrt(2*t) + 1)
    return _unwrap(first), _unwrap(0.5*q**0.5 - first), _unwrap(bound)


def _check_strip_range(s, open_left):
    s = np.asarray(s, dtype=float)
    lower_violation = s <= 0. if open_left else s < 0.
    if np.any(lower_violation) or np.any(s >= constants.HALF_PI):
        side = "(0, pi/2)" if open_left else "[0, pi/2)"
        raise RangeError(f"s must lie in {side}")
    return s


def warp_f_strip(s):
    """The warping function on the strip.

    ``(sqrt(1 + sin s) - sqrt(1 - sin s))/(2 sqrt(cos s))``, independent of r.

    Raises:
        RangeError: If s lies outside [0, pi/2).

    """
    s = _check_strip_range(s, open_left=False)
    sin = np.sin(s)
    return _unwrap(0.5*(np.sqrt(1 + sin) - np.sqrt(1 - sin))/np.sqrt(np.cos(s)))


def coefficient_G(s):
    """Logarithmic derivative ``G = f_s/f`` of the strip warping function.

    Evaluated as ``(cot(s/2) + tan(s))/2``, which equals the radical form
    ``((a + b)/(a - b) + tan s)/2`` with ``a, b = sqrt(1 +- sin s)`` without its
    cancellation near s = 0.

    Raises:
        RangeError: If s lies outside (0, pi/2), where G is infinite.

    """
    s = _check_strip_range(s, open_left=True)
    return _unwrap(0.5*(1/np.tan(s/2) + np.tan(s)))


def coefficient_G_radical(s):
    """``G`` in its radical form, used to cross-check ``coefficient_G``."""
    s = _check_strip_range(s, open_left=True)
    a, b = np.sqrt(1 + np.sin(s)), np.sqrt(1 - np.sin(s))
    return _unwrap(0.5*((a + b)/(a - b) + np.tan(s)))


def coefficient_G_sin(s):
    """``G(s) sin(s)``, continuous on [0, pi/2) with value 1 at s = 0."""
    s = _check_strip_range(s, open_left=False)
    return _unwrap(0.5*(1 + np.cos(s) + np.sin(s)*np.tan(s)))


@dataclasses.dataclass(frozen=True)
class GeometryJet:
    """Pointwise geometric data at points of H.

    All fields are arrays of the shape of ``z``; ``F``, ``gamma_x`` and
    ``gamma_y`` carry a leading component axis.

    Attributes:
        z (np.ndarray): The points.
        lam (np.ndarray): Conformal coefficient ``g_xx = g_yy = 1/(1 - |z|^2)^2``.
        f (np.ndarray): Warping function.
        f_x, f_y (np.ndarray): Warping gradient.
        psi (np.ndarray): Strip image of z.
        psi_prime (np.ndarray): ``psi'(z)``.
        F (np.ndarray): Components ``(F^x, F^y)`` of ``grad log f``.
        gamma_x, gamma_y (np.ndarray): Christoffel symbols ``Gamma^x_ij`` and
            ``Gamma^y_ij`` in ``COEFFICIENT_ORDER``; these are the coefficients
            of the displays for nabla dx and nabla dy.

    """

    z: np.ndarray
    lam: np.ndarray
    f: np.ndarray
    f_x: np.ndarray
    f_y: np.ndarray
    psi: np.ndarray
    psi_prime: np.ndarray
    F: np.ndarray
    gamma_x: np.ndarray
    gamma_y: np.ndarray

    @property
    def defect(self):
        """np.ndarray: ``1 - |z|^2``."""
        return 1 - abs(self.z)**2

    @property
    def norm_dx(self):
        """np.ndarray: ``||dx||_g = ||dy||_g = 1 - |z|^2``."""
        return self.defect

    @property
    def norm_dtheta(self):
        """np.ndarray: ``||dtheta||_g = 1/f``."""
        return 1/self.f

    @property
    def inverse_metric(self):
        """np.ndarray: Diagonal ``(g^xx, g^yy, g^tt)``."""
        return np.stack([1/self.lam, 1/self.lam, 1/self.f**2])

    def christoffel(self):
        """Return ``Gamma[k, i, j]`` with k, i, j over (x, y, theta).

        Only entries that couple to dtheta through ``tt`` are nonzero besides
        the planar block; mixed planar/theta entries with a planar upper index
        vanish.

        """
        shape = (3, 3, 3) + np.shape(self.z)
        gamma = np.zeros(shape)
        for k, coefficients in enumerate([self.gamma_x, self.gamma_y]):
            gamma[k, 0, 0] = coefficients[0]
            gamma[k, 0, 1] = coefficients[1]
            gamma[k, 1, 0] = coefficients[2]
            gamma[k, 1, 1] = coefficients[3]
            gamma[k, 2, 2] = coefficients[4]
        gamma[2, 0, 2] = gamma[2, 2, 0] = self.f_x/self.f
        gamma[2, 1, 2] = gamma[2, 2, 1] = self.f_y/self.f
        return gamma


def check_jet_domain(z, corner_radius=constants.CORNER_RADIUS):
    """Raise ``DomainError`` unless every point is a valid jet location."""
    z = np.asarray(z, dtype=complex)
    if np.any(abs(z) >= 1.):
        raise DomainError("jets require |z| < 1")
    if np.any(z.real <= 0.):
        raise DomainError("jets are undefined on L, where f = 0")
    corner = np.minimum(abs(z - 1j), abs(z + 1j))
    if np.any(corner < corner_radius):
        raise DomainError(f"jets refuse points within {corner_radius} of +-i")
    return z


def geometry_jet(z):
    """Evaluate all pointwise geometric data at points of H.

    Args:
        z (complex or np.ndarray): Interior points of H, away from +-i.

    Returns:
        GeometryJet: Closed-form conformal factor, warping data, strip map and
        Christoffel symbols.

    Raises:
        DomainError: On L, outside the disk, or within ``CORNER_RADIUS`` of +-i.

    """
    z = check_jet_domain(z)
    x, y = z.real, z.imag
    defect = 1 - abs(z)**2
    f = np.asarray(warp_f(z))
    f_x, f_y = (np.asarray(a) for a in warp_gradient(z))
    # Log-derivatives of the conformal factor 1/(1 - |z|^2)^2, halved.
    phi_x, phi_y = 2*x/defect, 2*y/defect
    theta_x = -defect**2*f*f_x
    theta_y = -defect**2*f*f_y
    gamma_x = np.stack([phi_x, phi_y, phi_y, -phi_x, theta_x])
    gamma_y = np.stack([-phi_y, phi_x, phi_x, phi_y, theta_y])
    F = np.stack([defect**2*f_x/f, defect**2*f_y/f])
    return GeometryJet(
        z=z,
        lam=1/defect**2,
        f=f,
        f_x=f_x,
        f_y=f_y,
        psi=np.asarray(psi(z)),
        psi_prime=np.asarray(psi_prime(z)),
        F=F,
        gamma_x=gamma_x,
        gamma_y=gamma_y,
    )


def metric_diagonal(x, y):
    """Diagonal ``(g_xx, g_yy, g_tt)`` of the warped metric at (x, y)."""
    z = np.asarray(x, dtype=float) + 1j*np.asarray(y, dtype=float)
    defect = 1 - abs(z)**2
    f = np.asarray(warp_f(z))
    return np.stack([1/defect**2, 1/defect**2, f**2])


def christoffel_from_metric(metric, x, y, step=1e-5):
    """Christoffel symbols of a theta-independent metric by central differences.

    Evaluates ``Gamma^k_ij = g^kl (d_j g_il + d_i g_jl - d_l g_ij)/2`` with
    coordinates ordered (x, y, theta).

    Args:
        metric (callable): ``metric(x, y)`` returning the metric components,
            either a full ``(3, 3, ...)`` array or its ``(3, ...)`` diagonal.
        x, y (float or np.ndarray): Evaluation points.
        step (float): Central difference step.

    Returns:
        np.ndarray: ``Gamma[k, i, j]``, with trailing point axes.

    """
    def full(xx, yy):
        g = np.asarray(metric(xx, yy), dtype=float)
        if g.shape[:2] != (3, 3):
            g = np.einsum("ij,i...->ij...", np.eye(3), g)
        return g

    g = full(x, y)
    dg = np.zeros((3,) + g.shape)
    dg[0] = (full(x + step, y) - full(x - step, y))/(2*step)
    dg[1] = (full(x, y + step) - full(x, y - step))/(2*step)
    # dg[l, i, j] = d_l g_ij; theta derivatives vanish.
    lowered = 0.5*(np.einsum("jil...->lij...", dg)
                   + np.einsum("ijl...->lij...", dg)
                   - dg)
    g_inverse = np.linalg.inv(np.moveaxis(g, (0, 1), (-2, -1)))
    g_inverse = np.moveaxis(g_inverse, (-2, -1), (0, 1))
    return np.einsum("kl...,lij...->kij...", g_inverse, lowered)
