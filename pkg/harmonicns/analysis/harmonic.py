"""Harmonic potentials on H pulled back from strip fields.

A strip function v gives the potential ``u = v o psi`` on H. Its derivatives
come from the strip derivatives of v and the closed forms of psi' and psi''
via the chain rule; ``du`` is then a harmonic 1-form on the warped product
whenever v solves the strip equation.

"""
import dataclasses
import logging

import numpy as np

from harmonicns.analysis.inequalities import MarginReport, uniform_half_disk
from harmonicns.core import constants
from harmonicns.core.errors import DomainError, OutOfWindowError
from harmonicns.geometry import hyperbolic
from harmonicns.strip.bvp import StripJet

logger = logging.getLogger(__name__)

JET_COLUMNS = ("x", "y", "u", "u_x", "u_y", "u_xx", "u_xy", "u_yy", "laplacian",
               "norm_du", "norm_nabla_du_sq", "extrapolated")


@dataclasses.dataclass(frozen=True)
class AnalyticStripFunction:
    """A strip function given by closed forms for all its derivatives.

    Args:
        jet (callable): ``jet(r, s)`` returning ``(v, v_r, v_s, v_rr, v_rs, v_ss)``.
        name (str): Label for logs.

    """

    jet: object
    name: str = "analytic"

    def in_window(self, r, s):
        return np.ones(np.broadcast(np.asarray(r), np.asarray(s)).shape, dtype=bool)

    def derivatives(self, r, s):
        r, s = np.broadcast_arrays(np.asarray(r, dtype=float),
                                   np.asarray(s, dtype=float))
        return StripJet(*(np.asarray(a, dtype=float)*np.ones(r.shape)
                          for a in self.jet(r, s)))

    @classmethod
    def constant(cls, value=1.):
        return cls(lambda r, s: (value, 0., 0., 0., 0., 0.), "constant")

    @classmethod
    def linear_r(cls):
        """``v = r``, pulling back to ``u = Re psi``."""
        return cls(lambda r, s: (r, 1., 0., 0., 0., 0.), "linear_r")

    @classmethod
    def cosine(cls):
        """``v = cos(r) cos(s)``."""
        def jet(r, s):
            cr, sr, cs, ss = np.cos(r), np.sin(r), np.cos(s), np.sin(s)
            return (cr*cs, -sr*cs, -cr*ss, -cr*cs, sr*ss, -cr*cs)
        return cls(jet, "cosine")


@dataclasses.dataclass(frozen=True)
class HarmonicFieldHandle:
    """A strip function together with the rule for points beyond its window.

    Args:
        source: A ``StripField`` or ``AnalyticStripFunction``.
        decay_model (bool): Use v = 0 for strip points outside the window and
            flag the jets ``extrapolated``, instead of raising.

    """

    source: object
    decay_model: bool = False
    _cache: dict = dataclasses.field(default_factory=dict, compare=False, repr=False)

    @property
    def spacing(self):
        """float or None: Largest grid spacing of a discrete source."""
        grid = getattr(self.source, "grid", None)
        return None if grid is None else max(grid.h_r, grid.h_s)

    @property
    def window(self):
        """float: Largest |Re psi| covered by the source."""
        grid = getattr(self.source, "grid", None)
        return np.inf if grid is None else grid.window

    def covered(self, z):
        """Mask of disk points whose strip image lies in the window."""
        w = np.asarray(hyperbolic.psi(z))
        return np.asarray(self.source.in_window(w.real, np.clip(w.imag, 0., None)))

    def strip_jet(self, w):
        """Strip derivatives at the points ``w`` and the extrapolated mask."""
        w = np.asarray(w, dtype=complex)
        r, s = w.real, np.clip(w.imag, 0., constants.HALF_PI)
        inside = np.asarray(self.source.in_window(r, s))
        if np.all(inside):
            return self.source.derivatives(r, s), ~inside
        if not self.decay_model:
            raise OutOfWindowError(
                f"{np.count_nonzero(~inside)} points map beyond |r| = {self.window:.6g}"
            )
        logger.debug("Decay model used at %d points", np.count_nonzero(~inside))
        values = [np.zeros(r.shape) for _ in StripJet._fields]
        if np.any(inside):
            partial = self.source.derivatives(r[inside], s[inside])
            for target, source in zip(values, partial):
                target[inside] = source
        return StripJet(*values), ~inside

    def scaled(self, factor):
        """Handle of the source multiplied by ``factor``."""
        source = self.source
        if hasattr(source, "grid"):
            source = dataclasses.replace(
                source, v=factor*source.v, v0=factor*source.v0,
                forcing=None if source.forcing is None else factor*source.forcing)
        else:
            jet = source.jet
            source = AnalyticStripFunction(
                lambda r, s: tuple(factor*np.asarray(a) for a in jet(r, s)),
                f"{factor}*{source.name}")
        return HarmonicFieldHandle(source, self.decay_model)

    def sample_jets(self, n, seed=constants.DEFAULT_SEED, radius=1.):
        """Jets at ``n`` uniform samples of H within ``radius``, cached.

        Points near +-i, near L or outside the window are skipped.

        """
        key = (n, seed, radius)
        if key not in self._cache:
            rng = np.random.default_rng(seed)
            z = np.empty(0, dtype=complex)
            while z.size < n:
                batch = radius*uniform_half_disk(n, rng, constants.CORNER_RADIUS)
                batch = batch[batch.real > constants.AXIS_MARGIN]
                if not self.decay_model:
                    batch = batch[self.covered(batch)]
                z = np.concatenate([z, batch])
            z = z[:n]
            self._cache[key] = (z, pullback_jet(self, z))
        return self._cache[key]


@dataclasses.dataclass(frozen=True)
class OneFormJet:
    """The potential u with its first and second derivatives at points of H.

    Attributes:
        z (np.ndarray): The points.
        u, u_x, u_y, u_xx, u_xy, u_yy (np.ndarray): Values and partials.
        nabla_du (np.ndarray): ``(3, 3, ...)`` covariant derivative of du in
            the coframe (dx, dy, dtheta).
        inverse_metric (np.ndarray): Diagonal ``(g^xx, g^yy, g^tt)``.
        extrapolated (np.ndarray): Mask of points evaluated by the decay model.

    """

    z: np.ndarray
    u: np.ndarray
    u_x: np.ndarray
    u_y: np.ndarray
    u_xx: np.ndarray
    u_xy: np.ndarray
    u_yy: np.ndarray
    nabla_du: np.ndarray
    inverse_metric: np.ndarray
    extrapolated: np.ndarray

    @property
    def du(self):
        return np.stack([self.u_x, self.u_y])

    @property
    def hess(self):
        return np.stack([self.u_xx, self.u_xy, self.u_yy])

    @property
    def defect(self):
        """np.ndarray: ``1 - |z|^2``."""
        return 1 - abs(self.z)**2

    @property
    def laplacian(self):
        """np.ndarray: ``(1 - |z|^2)^2 (u_xx + u_yy)``."""
        return self.defect**2*(self.u_xx + self.u_yy)

    @property
    def norm_du(self):
        """np.ndarray: ``||du||_g = (1 - |z|^2) |grad u|``."""
        return self.defect*np.hypot(self.u_x, self.u_y)

    @property
    def norm_nabla_du_sq(self):
        return tensor_norm_sq(self.nabla_du, self.inverse_metric)


def tensor_norm_sq(tensor, inverse_metric):
    """``sum g^ii g^jj T_ij^2`` for a diagonal metric."""
    return np.einsum("i...,j...,ij...->...", inverse_metric, inverse_metric, tensor**2)


def lower_order_term(u_x, u_y, geo):
    """``u_x nabla dx + u_y nabla dy`` as a ``(3, 3, ...)`` array."""
    gamma = geo.christoffel()
    return -(u_x*gamma[0] + u_y*gamma[1])


def _nabla_du(u_x, u_y, u_xx, u_xy, u_yy, geo):
    nabla = lower_order_term(u_x, u_y, geo)
    nabla[0, 0] = nabla[0, 0] + u_xx
    nabla[0, 1] = nabla[0, 1] + u_xy
    nabla[1, 0] = nabla[1, 0] + u_xy
    nabla[1, 1] = nabla[1, 1] + u_yy
    return nabla


def covariant_derivative(jet, geo):
    """The covariant derivative of du: Hessian block plus the lower-order term.

    Args:
        jet (OneFormJet): Supplies ``u_x, u_y, u_xx, u_xy, u_yy``.
        geo (GeometryJet): Geometry at the same points.

    Returns:
        np.ndarray: ``(3, 3, ...)`` symmetric components in (dx, dy, dtheta).

    """
    return _nabla_du(jet.u_x, jet.u_y, jet.u_xx, jet.u_xy, jet.u_yy, geo)


def lower_order_closed_form(u_x, u_y, geo):
    """``8|z|^2 |du|^2 (1 - |z|^2)^2 + (1 - |z|^2)^4 (u_x f_x + u_y f_y)^2/f^2``."""
    defect = geo.defect
    return (8*abs(geo.z)**2*(u_x**2 + u_y**2)*defect**2
            + defect**4*(u_x*geo.f_x + u_y*geo.f_y)**2/geo.f**2)


def pullback_jet(handle, z):
    """Assemble u = v o psi and its derivatives by the chain rule.

    With ``a + ib = psi'`` and ``c + id = psi''``, Cauchy-Riemann gives
    ``r_x = s_y = a``, ``s_x = -r_y = b``, ``r_xx = -r_yy = c``,
    ``s_xx = -s_yy = d``, ``r_xy = -d`` and ``s_xy = c``.

    Args:
        handle (HarmonicFieldHandle): The field.
        z (complex or np.ndarray): Interior points of H.

    Returns:
        OneFormJet: The jets, with ``extrapolated`` set where the decay model
        was used.

    Raises:
        OutOfWindowError: If a point maps beyond the window and the handle has
            no decay model.
        DomainError: For points on L or near +-i.

    """
    geo = hyperbolic.geometry_jet(z)
    (v, v_r, v_s, v_rr, v_rs, v_ss), extrapolated = handle.strip_jet(geo.psi)
    prime = np.asarray(hyperbolic.psi_prime(geo.z))
    second = np.asarray(hyperbolic.psi_second(geo.z))
    a, b, c, d = prime.real, prime.imag, second.real, second.imag
    u_x = a*v_r + b*v_s
    u_y = -b*v_r + a*v_s
    u_xx = a*a*v_rr + 2*a*b*v_rs + b*b*v_ss + c*v_r + d*v_s
    u_xy = -a*b*v_rr + (a*a - b*b)*v_rs + a*b*v_ss - d*v_r + c*v_s
    u_yy = b*b*v_rr - 2*a*b*v_rs + a*a*v_ss - c*v_r - d*v_s
    return OneFormJet(
        z=geo.z,
        u=v,
        u_x=u_x,
        u_y=u_y,
        u_xx=u_xx,
        u_xy=u_xy,
        u_yy=u_yy,
        nabla_du=_nabla_du(u_x, u_y, u_xx, u_xy, u_yy, geo),
        inverse_metric=geo.inverse_metric,
        extrapolated=np.asarray(extrapolated),
    )


def _check_axis(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < constants.AXIS_MARGIN):
        raise DomainError(f"residuals need x >= {constants.AXIS_MARGIN}")
    return z


def harmonic_residual(handle, z):
    """Residual of the harmonic equation for u at points of H.

    Returns ``-laplacian - du(F)``, which vanishes exactly when
    ``u_xx + u_yy + grad u . grad f/f = 0``; for pulled back strip functions it
    equals ``-(1 - |z|^2)^2 |psi'|^2`` times the strip operator.

    Raises:
        DomainError: Within ``AXIS_MARGIN`` of L, or near +-i.

    """
    z = _check_axis(z)
    geo = hyperbolic.geometry_jet(z)
    jet = pullback_jet(handle, z)
    return -jet.laplacian - (jet.u_x*geo.F[0] + jet.u_y*geo.F[1])


def hodge_residual(handle, z, step=1e-5):
    """The 1-form residual for ``omega = du``, i.e. d of the scalar residual.

    Evaluated by central differences of ``harmonic_residual`` in x and y.

    Returns:
        np.ndarray: Components ``(dx, dy)`` of shape ``(2,) + z.shape``.

    """
    z = _check_axis(np.asarray(z, dtype=complex))
    _check_axis(z - step)
    return np.stack([
        (harmonic_residual(handle, z + step) - harmonic_residual(handle, z - step))/(2*step),
        (harmonic_residual(handle, z + 1j*step)
         - harmonic_residual(handle, z - 1j*step))/(2*step),
    ])


def closedness_defect(handle, z, step=1e-5):
    """``d(du)`` component ``(u_x)_y - (u_y)_x`` by central differences of jets."""
    z = np.asarray(z, dtype=complex)
    above, below = pullback_jet(handle, z + 1j*step), pullback_jet(handle, z - 1j*step)
    right, left = pullback_jet(handle, z + step), pullback_jet(handle, z - step)
    return (above.u_x - below.u_x)/(2*step) - (right.u_y - left.u_y)/(2*step)


def _fitted_constant(values, scale):
    mask = scale > 0.
    return float(np.max(abs(values[mask])/scale[mask])) if np.any(mask) else 0.


def verify_pointwise_bounds(handle, n=constants.DEFAULT_BOUND_SAMPLES,
                            seed=constants.DEFAULT_SEED):
    """Suprema of the first and second derivative bounds over samples of H.

    The first report is ``sup |u_x| + |u_y|``; the second is
    ``sup (|u_xx| + |u_xy| + |u_yy|)/|psi'|``. Both pass when finite. The
    first report also carries fitted constants of ``||du||^4 <= C (1 - |z|^2)^2``
    and ``|laplacian| <= C (1 - |z|^2)``.

    Returns:
        tuple[MarginReport]: ``(first, second)``.

    """
    z, jet = handle.sample_jets(n, seed)
    first = abs(jet.u_x) + abs(jet.u_y)
    second = (abs(jet.u_xx) + abs(jet.u_xy) + abs(jet.u_yy))/abs(hyperbolic.psi_prime(z))
    i, j = int(np.argmax(first)), int(np.argmax(second))
    defect = jet.defect
    first_report = MarginReport(
        lemma="gradient-bound",
        samples=n,
        worst_value=float(first[i]),
        worst_location=[float(z[i].real), float(z[i].imag)],
        verdict="pass" if np.isfinite(first[i]) else "fail",
        details={
            "du4_constant": _fitted_constant(jet.norm_du**4, defect**2),
            "laplacian_constant": _fitted_constant(jet.laplacian, defect),
            "extrapolated": int(np.count_nonzero(jet.extrapolated)),
        },
    )
    second_report = MarginReport(
        lemma="hessian-bound",
        samples=n,
        worst_value=float(second[j]),
        worst_location=[float(z[j].real), float(z[j].imag)],
        verdict="pass" if np.isfinite(second[j]) else "fail",
    )
    logger.info("Pointwise bounds: C1=%.6g, C2=%.6g", first[i], second[j])
    return first_report, second_report


def nabla_du_split(handle, z):
    """The Hessian, mixed and lower-order parts of ``||nabla du||^2``.

    Returns:
        dict: For each part, its values and the fitted C of
        ``part <= C (1 - |z|^2)^2``.

    """
    geo = hyperbolic.geometry_jet(z)
    jet = pullback_jet(handle, z)
    inverse = geo.inverse_metric
    hessian = np.zeros_like(jet.nabla_du)
    hessian[0, 0], hessian[0, 1] = jet.u_xx, jet.u_xy
    hessian[1, 0], hessian[1, 1] = jet.u_xy, jet.u_yy
    lower = lower_order_term(jet.u_x, jet.u_y, geo)
    parts = {
        "hessian": tensor_norm_sq(hessian, inverse),
        "mixed": 2*np.einsum("i...,j...,ij...,ij...->...", inverse, inverse, hessian, lower),
        "lower_order": tensor_norm_sq(lower, inverse),
    }
    scale = geo.defect**2
    return {name: {"values": values, "constant": _fitted_constant(values, scale)}
            for name, values in parts.items()}


def kinetic_gradient(jet):
    """Analytic ``(d_x, d_y)`` of ``||du||^2/2 = (1 - |z|^2)^2 |grad u|^2/2``."""
    x, y = jet.z.real, jet.z.imag
    defect = jet.defect
    grad_sq = jet.u_x**2 + jet.u_y**2
    return np.stack([
        -2*x*defect*grad_sq + defect**2*(jet.u_x*jet.u_xx + jet.u_y*jet.u_xy),
        -2*y*defect*grad_sq + defect**2*(jet.u_x*jet.u_xy + jet.u_y*jet.u_yy),
    ])


def convective_term(jet):
    """``nabla_U du`` for ``U = (du)^#``, as 1-form components ``(x, y)``."""
    weight = jet.defect**2
    return np.stack([
        weight*(jet.u_x*jet.nabla_du[0, 0] + jet.u_y*jet.nabla_du[1, 0]),
        weight*(jet.u_x*jet.nabla_du[0, 1] + jet.u_y*jet.nabla_du[1, 1]),
    ])


def jet_rows(jet):
    """CSV rows in the order of ``JET_COLUMNS``."""
    return np.column_stack([
        np.ravel(jet.z.real), np.ravel(jet.z.imag), np.ravel(jet.u),
        np.ravel(jet.u_x), np.ravel(jet.u_y), np.ravel(jet.u_xx),
        np.ravel(jet.u_xy), np.ravel(jet.u_yy), np.ravel(jet.laplacian),
        np.ravel(jet.norm_du), np.ravel(jet.norm_nabla_du_sq),
        np.ravel(jet.extrapolated).astype(float),
    ])
