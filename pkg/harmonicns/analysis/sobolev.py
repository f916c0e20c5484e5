"""Quadrature of the Sobolev integrals of du over the half-disk.

Every integral over the warped product reduces to H with the volume density
``f/(1 - |z|^2)^2``; the circle fiber contributes a factor 2 pi. The mesh is
polar with rings graded geometrically towards the arc |z| = 1, where f blows
up like ``(1 - |z|)^(-1/2)``.

"""
import dataclasses
import logging
import time

import numpy as np
from scipy import special

from harmonicns.analysis import harmonic
from harmonicns.core import constants
from harmonicns.core.errors import ConfigError
from harmonicns.geometry import hyperbolic

logger = logging.getLogger(__name__)

# Integrand kinds and the report fields they fill.
KINDS = ("volume", "l2", "l4", "h1", "w14")
REPORT_FIELDS = {"volume": "base_volume", "l2": "l2_du", "l4": "l4_du",
                 "h1": "h1_du", "w14": "w14_du"}
CHUNK = 50000


@dataclasses.dataclass(frozen=True)
class DiskMesh:
    """Tensor Gauss mesh of H in polar coordinates.

    Rings are uniform on [0, INNER_RADIUS] and then ``rho_k = 1 - (1 -
    INNER_RADIUS) q^k`` with ``q = GRADING_RATIO^(1/2^level)``; the angular
    cells on (-pi/2, pi/2) are uniform. Each refinement level halves all
    cells and deepens the grading.

    Args:
        level (int): Refinement level, starting at 0.
        order (int): Gauss-Legendre points per cell and direction.

    """

    level: int = 0
    order: int = constants.GAUSS_ORDER

    @property
    def radial_edges(self):
        """np.ndarray: Ring boundaries, ending at ``outer_radius``."""
        scale = 2**self.level
        inner = np.linspace(0., constants.INNER_RADIUS,
                            constants.INNER_CELLS*scale + 1)
        depth = (constants.GRADED_DEPTH + constants.GRADED_DEPTH_STEP*self.level)*scale
        q = constants.GRADING_RATIO**(1/scale)
        graded = 1 - (1 - constants.INNER_RADIUS)*q**np.arange(1, depth + 1)
        return np.concatenate([inner, graded])

    @property
    def angular_edges(self):
        return np.linspace(-constants.HALF_PI, constants.HALF_PI,
                           constants.ANGULAR_CELLS*2**self.level + 1)

    @property
    def outer_radius(self):
        return float(self.radial_edges[-1])

    @property
    def cells(self):
        """int: Number of polar cells."""
        return (len(self.radial_edges) - 1)*(len(self.angular_edges) - 1)

    def nodes(self):
        """Quadrature nodes and weights of ``dx dy``.

        Returns:
            tuple[np.ndarray]: Complex nodes and weights, both of shape
            ``(rings, sectors, order, order)``.

        """
        points, weights = special.roots_legendre(self.order)
        rho, w_rho = self._cell_nodes(self.radial_edges, points, weights)
        alpha, w_alpha = self._cell_nodes(self.angular_edges, points, weights)
        z = rho[:, None, :, None]*np.exp(1j*alpha[None, :, None, :])
        w = (w_rho*rho)[:, None, :, None]*w_alpha[None, :, None, :]
        return z, w

    @staticmethod
    def _cell_nodes(edges, points, weights):
        lower, upper = edges[:-1, None], edges[1:, None]
        half = 0.5*(upper - lower)
        return lower + half*(points + 1), half*weights


def arc_tail(outer_radius):
    """Bound of the integral of f over ``outer_radius < |z| < 1``.

    Uses ``f <= (1 - |z|)^(-1/2)``, whose integral over the half-ring is at most
    ``2 pi sqrt(1 - outer_radius)``.

    """
    return 2*np.pi*np.sqrt(1 - outer_radius)


def integrand_values(handle, z):
    """All integrands at interior nodes of H, together with f.

    Returns:
        dict: Arrays for every kind of ``KINDS`` plus ``"f"``; the
        non-volume kinds include the density ``f/(1 - |z|^2)^2``.

    """
    f = np.asarray(hyperbolic.warp_f(z))
    values = {"f": f, "volume": f}
    if handle is None:
        return values
    jet = harmonic.pullback_jet(handle, z)
    density = f/jet.defect**2
    norm_du_sq = jet.norm_du**2
    norm_nabla_sq = jet.norm_nabla_du_sq
    values.update({
        "l2": norm_du_sq*density,
        "l4": norm_du_sq**2*density,
        "h1": norm_nabla_sq*density,
        "w14": norm_nabla_sq**2*density,
        "nabla_bound": norm_nabla_sq**2/jet.defect**4,
    })
    return values


def evaluate_level(handle, level, kinds=KINDS, order=constants.GAUSS_ORDER,
                   cell_values=False):
    """Integrate the requested kinds on one mesh level.

    Nodes within ``CORNER_RADIUS`` of +-i, and for handles without decay model
    nodes outside the strip window, are excluded; their share is bounded by
    ``C sum w f`` with C the largest integrand-to-f ratio over included
    nodes, and added to the tail together with ``C arc_tail``.

    Returns:
        dict: Per kind a ``(value, tail)`` pair; with ``cell_values`` also
        per-cell arrays under ``"cells"``.

    """
    mesh = DiskMesh(level, order)
    z, w = mesh.nodes()
    shape = z.shape
    z, w = z.ravel(), w.ravel()
    corner = np.minimum(abs(z - 1j), abs(z + 1j)) < constants.CORNER_RADIUS
    included = ~corner
    if handle is not None and not handle.decay_model:
        included[included] = handle.covered(z[included])
    sums = {kind: np.zeros(z.shape) for kind in kinds}
    ratio = dict.fromkeys(kinds, 0.)
    for start in range(0, z.size, CHUNK):
        part = np.arange(start, min(start + CHUNK, z.size))
        part = part[included[part]]
        if part.size == 0:
            continue
        values = integrand_values(handle, z[part])
        for kind in kinds:
            sums[kind][part] = values[kind]
            ratio[kind] = max(ratio[kind], float(np.max(abs(values[kind])/values["f"])))
    excluded_f = float(np.sum(w[~included]*np.asarray(
        hyperbolic.warp_f(np.where(included, 0.5, z)))[~included]))
    result = {}
    for kind in kinds:
        value = float(np.sum(w*sums[kind]))
        tail = ratio[kind]*(excluded_f + arc_tail(mesh.outer_radius))
        result[kind] = (value, tail)
    if cell_values:
        result["cells"] = {kind: (w*sums[kind]).reshape(shape).sum(axis=(2, 3))
                           for kind in kinds}
        result["mesh"] = mesh
    logger.debug("Level %d: %d cells, %d excluded nodes", level, mesh.cells,
                 np.count_nonzero(~included))
    return result


@dataclasses.dataclass
class QuadratureLadder:
    """Values of one integral over successive mesh levels.

    Attributes:
        kind (str): Integrand kind.
        levels (list[tuple]): ``(cells, value)`` per level.
        tail_budget (float): Bound of the part not covered by the finest mesh.
        theta_factor (bool): Whether the 2 pi fiber factor is included.
        threshold (float): Relative tolerance for convergence.

    """

    kind: str
    levels: list
    tail_budget: float
    theta_factor: bool = True
    threshold: float = constants.CONVERGENCE_THRESHOLD

    @property
    def value(self):
        return self.levels[-1][1]

    @property
    def relative_change(self):
        """float: Relative change between the last two levels."""
        if len(self.levels) < 2:
            return np.inf
        previous, last = self.levels[-2][1], self.levels[-1][1]
        if last == previous:
            return 0.
        return abs(last - previous)/max(abs(last), abs(previous))

    @property
    def extrapolated(self):
        """float: Richardson value of the last two levels for fourth order."""
        if len(self.levels) < 2:
            return self.value
        previous, last = self.levels[-2][1], self.levels[-1][1]
        return last + (last - previous)/15

    @property
    def converged(self):
        return bool(len(self.levels) >= 2
                    and self.relative_change <= self.threshold
                    and self.tail_budget <= self.threshold*abs(self.value))

    def to_dict(self):
        return {
            "kind": self.kind,
            "levels": [{"cells": int(c), "value": float(v)} for c, v in self.levels],
            "value": float(self.value),
            "extrapolated": float(self.extrapolated),
            "relative_change": float(self.relative_change),
            "tail_budget": float(self.tail_budget),
            "theta_factor": self.theta_factor,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["kind"], [(e["cells"], e["value"]) for e in data["levels"]],
                   data["tail_budget"], data["theta_factor"])


def _ladders(handle, levels, kinds, theta_factor, threshold):
    if levels < 2:
        raise ConfigError("quadrature_levels", "need at least 2 levels")
    factor = 2*np.pi if theta_factor else 1.
    results = []
    for level in range(levels):
        start = time.perf_counter()
        results.append(evaluate_level(handle, level, kinds))
        logger.info("Quadrature level %d done in %.2fs", level, time.perf_counter() - start)
    ladders = {}
    for kind in kinds:
        steps = [(DiskMesh(level).cells, factor*result[kind][0])
                 for level, result in enumerate(results)]
        ladders[kind] = QuadratureLadder(kind, steps, factor*results[-1][kind][1],
                                         theta_factor, threshold)
    return ladders


def integrate_disk(kind, handle=None, levels=constants.DEFAULT_QUADRATURE_LEVELS,
                   theta_factor=True, threshold=constants.CONVERGENCE_THRESHOLD):
    """Integrate one kind over H on ``levels`` successive meshes.

    Args:
        kind (str): One of ``KINDS``; ``"volume"`` integrates f alone.
        handle (HarmonicFieldHandle or None): The field; unused for volume.
        levels (int): Number of mesh levels.
        theta_factor (bool): Multiply by 2 pi.
        threshold (float): Relative tolerance for the verdict.

    Returns:
        QuadratureLadder: Flagged as not converged rather than raising.

    """
    if kind not in KINDS:
        raise ConfigError("integrand", f"unknown kind {kind!r}")
    if kind != "volume" and handle is None:
        raise ConfigError("integrand", f"{kind} needs a field")
    return _ladders(handle, levels, (kind,), theta_factor, threshold)[kind]


@dataclasses.dataclass
class SobolevReport:
    """The four Sobolev integrals of du and the volume integral of f.

    Attributes:
        l2_du, l4_du, h1_du, w14_du, base_volume (QuadratureLadder): Ladders.
        theta_factor (bool): Whether 2 pi is included.
        bound_checks (dict): Fitted constants of the integrand bounds.

    """

    l2_du: QuadratureLadder
    l4_du: QuadratureLadder
    h1_du: QuadratureLadder
    w14_du: QuadratureLadder
    base_volume: QuadratureLadder
    theta_factor: bool = True
    bound_checks: dict = dataclasses.field(default_factory=dict)

    @property
    def ladders(self):
        return {name: getattr(self, name) for name in REPORT_FIELDS.values()}

    @property
    def converged(self):
        return all(ladder.converged for ladder in self.ladders.values())

    @property
    def verdict(self):
        return "pass" if self.converged else "fail"

    def to_dict(self):
        data = {name: ladder.to_dict() for name, ladder in self.ladders.items()}
        data.update(theta_factor=self.theta_factor, bound_checks=self.bound_checks,
                    verdict=self.verdict)
        return data

    @classmethod
    def from_dict(cls, data):
        ladders = {name: QuadratureLadder.from_dict(data[name])
                   for name in REPORT_FIELDS.values()}
        return cls(theta_factor=data["theta_factor"],
                   bound_checks=data.get("bound_checks", {}), **ladders)


def bound_checks(handle, level=0):
    """Fitted constants of the bounds that make the integrals finite.

    ``||du||^2 density <= C f``, ``||nabla du||^2 density <= C f`` and
    ``||nabla du||^4 <= C (1 - |z|^2)^4``, over the nodes of one mesh level.

    """
    z, _ = DiskMesh(level).nodes()
    z = z.ravel()
    z = z[np.minimum(abs(z - 1j), abs(z + 1j)) >= constants.CORNER_RADIUS]
    if not handle.decay_model:
        z = z[handle.covered(z)]
    fitted = {"l2_density": 0., "h1_density": 0., "nabla_du4": 0.}
    for start in range(0, z.size, CHUNK):
        values = integrand_values(handle, z[start:start + CHUNK])
        current = {
            "l2_density": float(np.max(values["l2"]/values["f"])),
            "h1_density": float(np.max(values["h1"]/values["f"])),
            "nabla_du4": float(np.max(values["nabla_bound"])),
        }
        fitted = {name: max(fitted[name], current[name]) for name in fitted}
    logger.info("Integrand bound constants: %s",
                ", ".join(f"{k}={v:.4g}" for k, v in fitted.items()))
    return fitted


def sobolev_report(handle, levels=constants.DEFAULT_QUADRATURE_LEVELS,
                   theta_factor=True, threshold=constants.CONVERGENCE_THRESHOLD):
    """Run all five ladders for a field.

    Returns:
        SobolevReport: Not-converged ladders are flagged, never raised.

    """
    ladders = _ladders(handle, levels, KINDS, theta_factor, threshold)
    report = SobolevReport(
        theta_factor=theta_factor,
        bound_checks=bound_checks(handle),
        **{REPORT_FIELDS[kind]: ladder for kind, ladder in ladders.items()},
    )
    for name, ladder in report.ladders.items():
        if not ladder.converged:
            logger.warning("Ladder %s did not converge: change %.3g, tail %.3g",
                           name, ladder.relative_change, ladder.tail_budget)
    return report


def gram_matrix(handles, level=constants.DEFAULT_QUADRATURE_LEVELS - 1,
                theta_factor=True):
    """L2 pairings of ``du_i`` and ``du_j`` over the warped product.

    ``<du_i, du_j>_g f/(1 - |z|^2)^2 = (grad u_i . grad u_j) f``.

    """
    z, w = DiskMesh(level).nodes()
    z, w = z.ravel(), w.ravel()
    keep = np.minimum(abs(z - 1j), abs(z + 1j)) >= constants.CORNER_RADIUS
    for handle in handles:
        if not handle.decay_model:
            keep[keep] = handle.covered(z[keep])
    z, w = z[keep], w[keep]
    f = np.asarray(hyperbolic.warp_f(z))
    gradients = []
    for handle in handles:
        jet = harmonic.pullback_jet(handle, z)
        gradients.append(np.stack([jet.u_x, jet.u_y]))
    count = len(handles)
    gram = np.zeros((count, count))
    for i in range(count):
        for j in range(i, count):
            gram[i, j] = gram[j, i] = np.sum(
                w*f*np.sum(gradients[i]*gradients[j], axis=0))
    return (2*np.pi if theta_factor else 1.)*gram


def cell_rows(handle, level, kind="l2"):
    """CSV rows ``(rho_lo, rho_hi, alpha_lo, alpha_hi, value)`` per mesh cell."""
    result = evaluate_level(handle, level, (kind,), cell_values=True)
    mesh = result["mesh"]
    rho, alpha = mesh.radial_edges, mesh.angular_edges
    i, j = np.meshgrid(np.arange(len(rho) - 1), np.arange(len(alpha) - 1),
                       indexing="ij")
    return np.column_stack([rho[i].ravel(), rho[i + 1].ravel(), alpha[j].ravel(),
                            alpha[j + 1].ravel(), result["cells"][kind].ravel()])
