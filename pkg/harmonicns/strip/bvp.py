"""Finite differences for the degenerate elliptic problem on the strip.

The problem is

    v_rr + v_ss + G(s) v_s = F   on  -R < r < R, 0 < s < pi/2,
    v_s(r, 0) = 0,
    v(r, pi/2) = v0(r),

with G = f_s/f the logarithmic derivative of the strip warping function. Since
G ~ 1/s near the axis and v_s(r, 0) = 0, the axis row uses the limit equation
v_rr + 2v_ss = F together with an even ghost node. The truncation lines
r = +-R carry Dirichlet data.

"""
import dataclasses
import functools
import logging
import time
import typing

import numpy as np
import scipy.interpolate
import scipy.sparse as sp
import scipy.sparse.linalg

from harmonicns.analysis.inequalities import SupersolutionPolynomial
from harmonicns.core import constants
from harmonicns.core.errors import (
    ConfigError,
    OutOfWindowError,
    SolverError,
    VerificationError,
)
from harmonicns.geometry import hyperbolic

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class StripGrid:
    """Uniform node grid of the truncated strip [-R, R] x [0, pi/2].

    Args:
        R (float): Truncation half-width.
        n_r (int): Number of nodes in r.
        n_s (int): Number of nodes in s, including s = 0 and s = pi/2.

    """

    R: float = constants.DEFAULT_R
    n_r: int = constants.DEFAULT_NR
    n_s: int = constants.DEFAULT_NS

    def __post_init__(self):
        if self.n_r < constants.MIN_NODES:
            raise ConfigError("grid.n_r", f"need at least {constants.MIN_NODES} nodes")
        if self.n_s < constants.MIN_NODES:
            raise ConfigError("grid.n_s", f"need at least {constants.MIN_NODES} nodes")
        if not self.R > 0.:
            raise ConfigError("grid.R", "must be positive")

    @property
    def h_r(self):
        """float: Node spacing in r."""
        return 2*self.R/(self.n_r - 1)

    @property
    def h_s(self):
        """float: Node spacing in s."""
        return constants.HALF_PI/(self.n_s - 1)

    @property
    def r(self):
        """np.ndarray: Nodes in r."""
        return np.linspace(-self.R, self.R, self.n_r)

    @property
    def s(self):
        """np.ndarray: Nodes in s."""
        return np.linspace(0., constants.HALF_PI, self.n_s)

    @property
    def shape(self):
        """tuple[int]: Array shape ``(n_s, n_r)`` of node values."""
        return (self.n_s, self.n_r)

    @property
    def window(self):
        """float: Largest |r| at which derivatives are available."""
        return self.R - constants.WINDOW_MARGIN_NODES*self.h_r

    def mesh(self):
        """Return node coordinate arrays ``(r, s)`` of shape ``self.shape``."""
        r, s = np.meshgrid(self.r, self.s)
        return r, s

    def refined(self):
        """Return the grid with both spacings halved."""
        return StripGrid(self.R, 2*self.n_r - 1, 2*self.n_s - 1)


class StripJet(typing.NamedTuple):
    """Values and derivatives of a strip function up to second order."""

    v: np.ndarray
    v_r: np.ndarray
    v_s: np.ndarray
    v_rr: np.ndarray
    v_rs: np.ndarray
    v_ss: np.ndarray


def _difference_matrix(n, h, order):
    """Fourth-order difference matrix with one-sided rows at both ends."""
    if order == 1:
        D = sp.diags([1., -8., 8., -1.], [-2, -1, 1, 2], shape=(n, n))
        D = sp.lil_matrix(D)
        D[0, 0:5] = [-25., 48., -36., 16., -3.]
        D[1, 0:5] = [-3., -10., 18., -6., 1.]
        D[n-2, n-5:n] = [-1., 6., -18., 10., 3.]
        D[n-1, n-5:n] = [3., -16., 36., -48., 25.]
        return sp.csr_matrix(D)/(12*h)
    D = sp.diags([-1., 16., -30., 16., -1.], [-2, -1, 0, 1, 2], shape=(n, n))
    D = sp.lil_matrix(D)
    D[0, 0:6] = [45., -154., 214., -156., 61., -10.]
    D[1, 0:6] = [10., -15., -4., 14., -6., 1.]
    D[n-2, n-6:n] = [1., -6., 14., -4., -15., 10.]
    D[n-1, n-6:n] = [-10., 61., -156., 214., -154., 45.]
    return sp.csr_matrix(D)/(12*h*h)


@dataclasses.dataclass(frozen=True)
class StripField:
    """Node values of a function on the truncated strip.

    Args:
        grid (StripGrid): The node grid.
        v (np.ndarray): Node values of shape ``grid.shape``.
        v0 (np.ndarray): Boundary trace at s = pi/2; equals ``v[-1]``.
        forcing (np.ndarray or None): Right-hand side at the equation nodes.

    """

    grid: StripGrid
    v: np.ndarray
    v0: np.ndarray
    forcing: np.ndarray = None

    @classmethod
    def from_function(cls, grid, function):
        """Sample ``function(r, s)`` on the grid nodes."""
        r, s = grid.mesh()
        v = np.asarray(function(r, s), dtype=float)*np.ones(grid.shape)
        return cls(grid, v, v[-1].copy())

    def mirrored(self):
        """Return ``(s, v)`` of the even extension to [-pi/2, pi/2]."""
        s = np.concatenate([-self.grid.s[:0:-1], self.grid.s])
        v = np.concatenate([self.v[:0:-1], self.v])
        return s, v

    @functools.cached_property
    def node_jet(self):
        """StripJet: Fourth-order node derivatives on the even extension."""
        s, v = self.mirrored()
        D_r = _difference_matrix(self.grid.n_r, self.grid.h_r, 1)
        D_rr = _difference_matrix(self.grid.n_r, self.grid.h_r, 2)
        D_s = _difference_matrix(len(s), self.grid.h_s, 1)
        D_ss = _difference_matrix(len(s), self.grid.h_s, 2)
        v_r = (D_r @ v.T).T
        return StripJet(
            v=v,
            v_r=v_r,
            v_s=D_s @ v,
            v_rr=(D_rr @ v.T).T,
            v_rs=D_s @ v_r,
            v_ss=D_ss @ v,
        )

    @functools.cached_property
    def _splines(self):
        s, _ = self.mirrored()
        return [scipy.interpolate.RectBivariateSpline(s, self.grid.r, values)
                for values in self.node_jet]

    def in_window(self, r, s):
        """Mask of strip points at which derivatives are available."""
        r, s = np.asarray(r, dtype=float), np.asarray(s, dtype=float)
        return ((abs(r) <= self.grid.window)
                & (s >= -1e-12) & (s <= constants.HALF_PI + 1e-12))

    def derivatives(self, r, s):
        """Bicubic interpolation of the node derivatives at (r, s).

        Raises:
            OutOfWindowError: If any point is outside ``in_window``.

        """
        r, s = np.broadcast_arrays(np.asarray(r, dtype=float),
                                   np.asarray(s, dtype=float))
        if not np.all(self.in_window(r, s)):
            raise OutOfWindowError(
                f"strip derivatives need |r| <= {self.grid.window:.6g} and "
                "0 <= s <= pi/2"
            )
        s = np.clip(s, 0., constants.HALF_PI)
        values = [spline.ev(s, r).reshape(r.shape) for spline in self._splines]
        return StripJet(*values)


def strip_derivatives(field, point):
    """Values and derivatives of a strip field at a point.

    Args:
        field (StripField): The field.
        point (StripPoint or tuple): The point, or arrays ``(r, s)``.

    Returns:
        StripJet: ``(v, v_r, v_s, v_rr, v_rs, v_ss)``.

    """
    if isinstance(point, hyperbolic.StripPoint):
        point = (point.r, point.s)
    return field.derivatives(*point)


def decay_constant(field):
    """Fitted C in ``|v| + |v_r| + ... + |v_ss| <= C e^-|r|`` over window nodes.

    The two node rows next to s = pi/2 use one-sided stencils and are left out.

    """
    jet = field.node_jet
    n_s = field.grid.n_s
    total = sum(abs(values[n_s-1:]) for values in jet)
    r, s = field.grid.mesh()
    mask = ((abs(r) <= field.grid.window)
            & (s <= constants.HALF_PI - constants.WINDOW_MARGIN_NODES*field.grid.h_s))
    return float(np.max((total*np.exp(abs(r)))[mask]))


def _operator_matrix(grid):
    """Assemble the sparse matrix of the discrete problem."""
    n_s, n_r = grid.shape
    h_r2, h_s2 = grid.h_r**2, grid.h_s**2
    index = np.arange(n_s*n_r).reshape(grid.shape)
    rows, cols, vals = [], [], []

    def add(row, col, val):
        shape = np.shape(row)
        rows.append(np.ravel(row))
        cols.append(np.ravel(col))
        vals.append(np.broadcast_to(val, shape).ravel())

    # Interior rows.
    inner = index[1:-1, 1:-1]
    G = hyperbolic.coefficient_G(grid.s[1:-1])[:, None]*np.ones((1, n_r - 2))
    add(inner, inner, -2/h_r2 - 2/h_s2)
    add(inner, index[1:-1, 2:], 1/h_r2)
    add(inner, index[1:-1, :-2], 1/h_r2)
    add(inner, index[2:, 1:-1], 1/h_s2 + G/(2*grid.h_s))
    add(inner, index[:-2, 1:-1], 1/h_s2 - G/(2*grid.h_s))
    # Axis rows: v_rr + 2v_ss with the ghost value v(-h) = v(h).
    axis = index[0, 1:-1]
    add(axis, axis, -2/h_r2 - 4/h_s2)
    add(axis, index[0, 2:], 1/h_r2)
    add(axis, index[0, :-2], 1/h_r2)
    add(axis, index[1, 1:-1], 4/h_s2)
    # Dirichlet rows.
    dirichlet = np.concatenate([index[:, 0], index[:, -1], index[-1, 1:-1]])
    add(dirichlet, dirichlet, 1.)

    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_s*n_r, n_s*n_r),
    )
    return A.tocsc()


def _forcing_array(grid, forcing):
    values = np.zeros(grid.shape)
    if forcing is None:
        return values
    r, s = grid.mesh()
    if callable(forcing):
        values[:-1, 1:-1] = forcing(r[:-1, 1:-1], s[:-1, 1:-1])
    else:
        values[:-1, 1:-1] = np.asarray(forcing, dtype=float)[:-1, 1:-1]
    if not np.all(np.isfinite(values)):
        raise ConfigError("forcing", "must be finite at the equation nodes")
    return values


def _boundary_values(grid, v0, side):
    r, s = grid.mesh()
    top = np.asarray(v0(grid.r), dtype=float)*np.ones(grid.n_r)
    if side is None:
        left = np.full(grid.n_s, top[0])
        right = np.full(grid.n_s, top[-1])
    else:
        left = np.asarray(side(r[:, 0], s[:, 0]), dtype=float)*np.ones(grid.n_s)
        right = np.asarray(side(r[:, -1], s[:, -1]), dtype=float)*np.ones(grid.n_s)
    return top, left, right


def maximum_principle_holds(field, left=None, right=None, tolerance=1e-12):
    """Check min v >= min(0, data) and max v <= max data for unforced solves."""
    data = [field.v0]
    data += [np.asarray(b) for b in (left, right) if b is not None]
    data = np.concatenate([np.ravel(d) for d in data])
    scale = max(1., float(np.max(abs(data))))
    lower = min(0., float(np.min(data))) - tolerance*scale
    upper = float(np.max(data)) + tolerance*scale
    return bool(field.v.min() >= lower and field.v.max() <= upper)


def solve_bvp(grid, v0, forcing=None, side=None, comparison=False,
              check_maximum_principle=False, tolerance=constants.SOLVER_TOLERANCE):
    """Solve the strip problem with second-order finite differences.

    Args:
        grid (StripGrid): The node grid.
        v0 (callable): Boundary data on s = pi/2, e.g. a ``BoundaryProfile``.
        forcing (callable or np.ndarray or None): Right-hand side ``F(r, s)``;
            only evaluated at nodes below s = pi/2 and inside r = +-R.
        side (callable or None): Dirichlet data ``side(r, s)`` on r = +-R.
            Defaults to the constant values ``v0(+-R)``.
        comparison (bool): Require ``|v0(r)| <= p(pi/2) e^-|r|`` so that the
            supersolution bound applies.
        check_maximum_principle (bool): Verify the discrete maximum principle
            for unforced solves with nonnegative data.
        tolerance (float): Relative residual required of the linear solve.

    Returns:
        StripField: The solution.

    Raises:
        ConfigError: If ``comparison`` is on and the bound is violated.
        SolverError: If the linear solve misses ``tolerance``.
        VerificationError: If the maximum principle check fails.

    """
    if comparison:
        p_top = SupersolutionPolynomial().top_value
        ratio = float(np.max(abs(np.asarray(v0(grid.r)))*np.exp(abs(grid.r))))/p_top
        if ratio > 1.:
            raise ConfigError(
                "profile", f"v0 exceeds the supersolution trace by a factor {ratio:.4g}"
            )
    start = time.perf_counter()
    A = _operator_matrix(grid)
    F = _forcing_array(grid, forcing)
    top, left, right = _boundary_values(grid, v0, side)
    b = F.copy()
    b[:, 0] = left
    b[:, -1] = right
    b[-1, :] = top
    b = b.ravel()

    lu = scipy.sparse.linalg.splu(A)
    v = lu.solve(b)
    b_norm = float(np.max(abs(b)))

    def relative_residual(x):
        residual = float(np.max(abs(A @ x - b)))
        return residual/b_norm if b_norm > 0. else residual

    residual = relative_residual(v)
    if residual > tolerance:
        logger.debug("Refining solve with relative residual %.3e", residual)
        v = v + lu.solve(b - A @ v)
        residual = relative_residual(v)
    if not np.all(np.isfinite(v)) or residual > tolerance:
        raise SolverError(
            f"relative residual {residual:.3e} exceeds tolerance {tolerance:.1e}"
        )
    logger.info("Solved %dx%d strip problem (R=%g) in %.2fs, residual %.2e",
                grid.n_r, grid.n_s, grid.R, time.perf_counter() - start, residual)

    v = v.reshape(grid.shape)
    field = StripField(grid, v, v[-1].copy(), F if forcing is not None else None)
    if check_maximum_principle and forcing is None and min(
            top.min(), left.min(), right.min()) >= 0.:
        if not maximum_principle_holds(field, left, right):
            raise VerificationError("discrete maximum principle violated")
    return field


def apply_operator(field):
    """Discrete operator minus forcing at every equation node.

    Interior rows use the five-point stencil with coefficient G; the axis rows
    use the limit equation v_rr + 2v_ss. Dirichlet nodes get zero.

    """
    grid = field.grid
    v = field.v
    h_r2, h_s2 = grid.h_r**2, grid.h_s**2
    residual = np.zeros(grid.shape)
    G = hyperbolic.coefficient_G(grid.s[1:-1])[:, None]
    v_rr = (v[:, 2:] - 2*v[:, 1:-1] + v[:, :-2])/h_r2
    residual[1:-1, 1:-1] = (
        v_rr[1:-1]
        + (v[2:, 1:-1] - 2*v[1:-1, 1:-1] + v[:-2, 1:-1])/h_s2
        + G*(v[2:, 1:-1] - v[:-2, 1:-1])/(2*grid.h_s)
    )
    residual[0, 1:-1] = v_rr[0] + 4*(v[1, 1:-1] - v[0, 1:-1])/h_s2
    if field.forcing is not None:
        residual[:-1, 1:-1] -= field.forcing[:-1, 1:-1]
    return residual


def neumann_residual(field):
    """Largest residual of the axis rows, which carry the Neumann condition."""
    return float(np.max(abs(apply_operator(field)[0])))


def comparison_bound(field, polynomial=None):
    """Compare interior node values with the supersolution ``e^-|r| p(s)``.

    Returns:
        dict: ``min_value`` of v and ``max_ratio`` of ``v/(e^-|r| p(s))``
        over the nodes below s = pi/2 and inside r = +-R.

    """
    polynomial = SupersolutionPolynomial() if polynomial is None else polynomial
    r, s = field.grid.mesh()
    inner = (slice(None, -1), slice(1, -1))
    barrier = np.exp(-abs(r[inner]))*polynomial(s[inner])
    v = field.v[inner]
    return {"min_value": float(v.min()), "max_ratio": float(np.max(v/barrier))}


@dataclasses.dataclass(frozen=True)
class ReflectedField:
    """Even extension of a strip field to -pi/2 <= s <= pi/2.

    Attributes:
        grid (StripGrid): Grid of the upper half.
        s (np.ndarray): The ``2 n_s - 1`` nodes in s.
        v (np.ndarray): Node values of shape ``(2 n_s - 1, n_r)``.
        forcing (np.ndarray or None): Even extension of the forcing.

    """

    grid: StripGrid
    s: np.ndarray
    v: np.ndarray
    forcing: np.ndarray = None

    def residual(self):
        """Discrete operator minus forcing, with G extended as an odd function.

        The row at s = 0 uses the limit equation; the other equation rows use
        the five-point stencil.

        """
        grid, v = self.grid, self.v
        h_r2, h_s2 = grid.h_r**2, grid.h_s**2
        axis = grid.n_s - 1
        residual = np.zeros(v.shape)
        s = self.s[1:-1]
        upper = hyperbolic.coefficient_G(np.where(s == 0., 1., abs(s)))
        G = (np.sign(s)*upper)[:, None]
        v_rr = (v[:, 2:] - 2*v[:, 1:-1] + v[:, :-2])/h_r2
        residual[1:-1, 1:-1] = (
            v_rr[1:-1]
            + (v[2:, 1:-1] - 2*v[1:-1, 1:-1] + v[:-2, 1:-1])/h_s2
            + G*(v[2:, 1:-1] - v[:-2, 1:-1])/(2*grid.h_s)
        )
        residual[axis, 1:-1] = (v_rr[axis]
                                + 2*(v[axis+1, 1:-1] - 2*v[axis, 1:-1]
                                     + v[axis-1, 1:-1])/h_s2)
        if self.forcing is not None:
            residual[1:-1, 1:-1] -= self.forcing[1:-1, 1:-1]
        return residual


def reflect_extend(field, tolerance=constants.NEUMANN_TOLERANCE):
    """Extend a solved field evenly across s = 0.

    Raises:
        VerificationError: If the Neumann residual exceeds ``tolerance``.

    """
    residual = neumann_residual(field)
    if residual > tolerance:
        raise VerificationError(
            f"Neumann residual {residual:.3e} exceeds {tolerance:.1e}"
        )
    s, v = field.mirrored()
    forcing = None
    if field.forcing is not None:
        forcing = np.concatenate([field.forcing[:0:-1], field.forcing])
    return ReflectedField(field.grid, s, v, forcing)


def manufactured_solution(r, s):
    """Smooth even test solution ``cos(r) cos(s)``."""
    return np.cos(r)*np.cos(s)


def manufactured_forcing(r, s):
    """Forcing that makes ``manufactured_solution`` exact: L(cos r cos s)."""
    return -2*np.cos(r)*np.cos(s) - hyperbolic.coefficient_G_sin(s)*np.cos(r)


def convergence_study(grid, levels=3):
    """Max-norm errors of the manufactured solution on successively halved grids.

    Args:
        grid (StripGrid): Coarsest grid.
        levels (int): Number of grids.

    Returns:
        list[dict]: One entry per grid with ``n_r``, ``n_s``, ``h_r``, ``h_s``,
        ``error`` and, from the second grid on, ``ratio`` and ``order``.

    """
    table = []
    for _ in range(levels):
        field = solve_bvp(
            grid,
            v0=lambda r: manufactured_solution(r, constants.HALF_PI),
            forcing=manufactured_forcing,
            side=manufactured_solution,
        )
        r, s = grid.mesh()
        error = float(np.max(abs(field.v - manufactured_solution(r, s))))
        row = {"n_r": grid.n_r, "n_s": grid.n_s, "h_r": grid.h_r,
               "h_s": grid.h_s, "error": error}
        if table:
            row["ratio"] = table[-1]["error"]/error
            row["order"] = float(np.log2(row["ratio"]))
        table.append(row)
        grid = grid.refined()
    return table


def field_rows(field):
    """CSV rows ``(r, s, v, residual)``, row-major in s then r."""
    r, s = field.grid.mesh()
    residual = apply_operator(field)
    return np.column_stack([r.ravel(), s.ravel(), field.v.ravel(), residual.ravel()])
