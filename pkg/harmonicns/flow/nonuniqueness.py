"""Modulated harmonic fields as Leray-Hopf solutions of Navier-Stokes.

For a harmonic gradient field ``du`` on the warped product and a real function
``f(t)``, the field ``U = f(t) (du)^#`` with pressure
``p = -f'(t) u - f(t)^2 ||du||^2/2`` solves

    d_t U + nabla_U U + nu Delta_H U + grad p = 0

for every viscosity, since ``Delta_H du = 0``. With ``f = f0 e^(-kt)`` the
energy inequality holds exactly when ``k >= k_star = 2D/E0``.

"""
import dataclasses
import logging

import numpy as np

from harmonicns.analysis import harmonic, sobolev
from harmonicns.analysis.inequalities import uniform_half_disk
from harmonicns.core import constants
from harmonicns.core.errors import ConfigError, VerificationError

logger = logging.getLogger(__name__)

PROBE_RADIUS = 0.8
FD_STEP = 1e-5
DIRECT_SEPARATION_TOLERANCE = 0.01


@dataclasses.dataclass(frozen=True)
class ExponentialModulation:
    """Time factor ``f(t) = f0 e^(-kt)``.

    Args:
        f0 (float): Initial amplitude, nonzero.
        k (float): Decay rate, nonnegative.
        nu (float): Viscosity.

    """

    f0: float = constants.DEFAULT_F0
    k: float = 0.
    nu: float = constants.DEFAULT_NU

    def __post_init__(self):
        if self.f0 == 0.:
            raise ConfigError("f0", "must be nonzero")
        if self.k < 0.:
            raise ConfigError("k", "must be nonnegative")

    def __call__(self, t):
        return self.f0*np.exp(-self.k*np.asarray(t, dtype=float))

    def derivative(self, t):
        return -self.k*self(t)


@dataclasses.dataclass(frozen=True)
class EnergyLedger:
    """Energy ``E0 = ||du||^2``, dissipation ``D = ||nabla du||^2`` and ``k_star``."""

    E0: float
    D: float

    @property
    def k_star(self):
        return 2*self.D/self.E0

    def to_dict(self):
        return {"E0": self.E0, "D": self.D, "k_star": self.k_star}


def energy_ledger(report):
    """Energy constants of a converged Sobolev report.

    Raises:
        VerificationError: If the report did not converge or the field is zero.

    """
    if not report.converged:
        raise VerificationError("energy constants need a converged Sobolev report")
    E0, D = report.l2_du.value, report.h1_du.value
    if not E0 > 0. or not D > 0.:
        raise VerificationError("energy constants need a nonzero field")
    ledger = EnergyLedger(float(E0), float(D))
    logger.info("E0=%.8g D=%.8g k_star=%.8g", ledger.E0, ledger.D, ledger.k_star)
    return ledger


def energy_inequality_margin(ledger, k, t, f0=1.):
    """``||U0||^2 - ||U(t)||^2 - 4 int_0^t ||Def U||^2`` in closed form.

    Equals ``f0^2 (1 - e^(-2kt)) E0 (k - k_star)/k``, with the limit
    ``-4 D t f0^2`` at k = 0; its sign is exactly that of ``k - k_star``.

    """
    k, t = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(t, dtype=float))
    if np.any(t < 0.):
        raise ConfigError("t", "must be nonnegative")
    positive = k > 0.
    safe_k = np.where(positive, k, 1.)
    margin = np.where(
        positive,
        f0**2*(-np.expm1(-2*safe_k*t))*ledger.E0*(safe_k - ledger.k_star)/safe_k,
        -4*ledger.D*t*f0**2,
    )
    return margin[()] if margin.ndim == 0 else margin


def energy_norm(ledger, modulation, t):
    """``||U(t)|| = |f(t)| sqrt(E0)``, which is not conserved for k > 0."""
    return abs(modulation(t))*np.sqrt(ledger.E0)


def family_separation(ledger, k1, k2, t, f0=1., f0_2=None):
    """L2 distance ``|f0 e^(-k1 t) - f0_2 e^(-k2 t)| sqrt(E0)`` of two members.

    ``f0_2`` defaults to ``f0``.

    """
    t = np.asarray(t, dtype=float)
    f0_2 = f0 if f0_2 is None else f0_2
    return abs(f0*np.exp(-k1*t) - f0_2*np.exp(-k2*t))*np.sqrt(ledger.E0)


def direct_separation(handle, modulation_1, modulation_2, t,
                      levels=constants.DEFAULT_QUADRATURE_LEVELS, theta_factor=True):
    """The same distance by quadrature of the difference field."""
    factor = float(modulation_1(t) - modulation_2(t))
    ladder = sobolev.integrate_disk("l2", handle.scaled(factor), levels, theta_factor)
    return float(np.sqrt(ladder.value))


@dataclasses.dataclass(frozen=True)
class ModulatedSolution:
    """``U = f(t) (du)^#`` with its pressure."""

    modulation: ExponentialModulation
    handle: harmonic.HarmonicFieldHandle

    def velocity(self, t, z):
        """Components ``(U_x, U_y)`` of the 1-form ``f(t) du``."""
        jet = harmonic.pullback_jet(self.handle, z)
        return self.modulation(t)*jet.du

    def pressure(self, t, z):
        """``p = -f'(t) u - f(t)^2 ||du||^2/2``, gauge constant zero."""
        jet = harmonic.pullback_jet(self.handle, z)
        f, f_t = self.modulation(t), self.modulation.derivative(t)
        return -f_t*jet.u - 0.5*f**2*jet.norm_du**2


def ns_residual(solution, t, z, step=FD_STEP):
    """Terms of the Navier-Stokes residual of a modulated solution.

    The time term cancels the f' part of the pressure gradient exactly, and
    the convective term cancels the kinetic part analytically; what remains
    is ``nu f(t) d(harmonic residual)``, a discretization error.

    Returns:
        dict: 1-form components ``(2, ...)`` for ``time``, ``convective``,
        ``pressure``, ``viscous`` and ``total``, and the largest g-norm of the
        total as ``max_norm``.

    """
    jet = harmonic.pullback_jet(solution.handle, z)
    modulation = solution.modulation
    f, f_t = modulation(t), modulation.derivative(t)
    terms = {
        "time": f_t*jet.du,
        "convective": f**2*harmonic.convective_term(jet),
        "pressure": -f_t*jet.du - f**2*harmonic.kinetic_gradient(jet),
        "viscous": modulation.nu*f*harmonic.hodge_residual(solution.handle, z, step),
    }
    terms["total"] = (terms["time"] + terms["convective"]
                      + terms["pressure"] + terms["viscous"])
    norm = jet.defect*np.hypot(*terms["total"])
    terms["max_norm"] = float(np.max(norm)) if np.size(norm) else 0.
    return terms


def kinetic_gradient_fd(handle, z, step=FD_STEP):
    """Central differences of ``||du||^2/2``, to check ``kinetic_gradient``."""
    def kinetic(points):
        return 0.5*harmonic.pullback_jet(handle, points).norm_du**2
    z = np.asarray(z, dtype=complex)
    return np.stack([
        (kinetic(z + step) - kinetic(z - step))/(2*step),
        (kinetic(z + 1j*step) - kinetic(z - 1j*step))/(2*step),
    ])


def euler_residual_check(handle, z):
    """Steady Euler residual ``nabla_U U + grad p`` for f = 1, p = -||du||^2/2.

    Returns:
        dict: ``relative`` residual against the convective term, and the
        relative error of the analytic kinetic gradient against finite
        differences as ``fd_relative``.

    """
    jet = harmonic.pullback_jet(handle, z)
    convective = harmonic.convective_term(jet)
    gradient = harmonic.kinetic_gradient(jet)
    scale = float(np.max(abs(convective)))
    if scale == 0.:
        return {"relative": 0., "fd_relative": 0.}
    difference = kinetic_gradient_fd(handle, z) - gradient
    return {
        "relative": float(np.max(abs(convective - gradient)))/scale,
        "fd_relative": float(np.max(abs(difference)))/float(np.max(abs(gradient))),
    }


def probe_points(handle, n=constants.DEFAULT_PROBES, seed=constants.DEFAULT_SEED,
                 radius=PROBE_RADIUS):
    """Residual probes in ``|z| <= radius``, away from L and inside the window."""
    rng = np.random.default_rng(seed)
    z = np.empty(0, dtype=complex)
    while z.size < n:
        batch = radius*uniform_half_disk(n, rng)
        batch = batch[batch.real > constants.AXIS_MARGIN + 2*FD_STEP]
        if not handle.decay_model:
            batch = batch[handle.covered(batch)]
        z = np.concatenate([z, batch])
    return z[:n]


def family_summary(ledger, handle, modulations, probe_times=constants.DEFAULT_PROBE_TIMES,
                   probes=None, show_violations=False, direct_levels=None,
                   theta_factor=True):
    """Margins, residuals and separations of a family sharing initial data.

    Probe times are in units of ``1/k_star``. Separations are taken pairwise
    at ``t = 1/k_star``, each with the amplitudes of its two members. With
    ``direct_levels``, the first separation is recomputed by quadrature of
    the difference field on that many mesh levels.

    Returns:
        dict: ``E0, D, k_star, members, separations, verdict``, plus
        ``direct_separation`` when requested. The verdict fails if a member
        with ``k >= k_star`` violates the energy inequality, if an
        inadmissible member is present without ``show_violations``, or if the
        direct separation differs from the closed form by more than 1%.

    """
    if not modulations:
        raise ConfigError("k", "the modulation list is empty")
    times = np.asarray(probe_times, dtype=float)/ledger.k_star
    z = probe_points(handle) if probes is None else probes
    members, ok = [], True
    for modulation in modulations:
        margins = energy_inequality_margin(ledger, modulation.k, times, modulation.f0)
        admissible = modulation.k >= ledger.k_star
        residual = ns_residual(ModulatedSolution(modulation, handle), 0., z)
        if admissible and np.any(margins < 0.):
            ok = False
        if not admissible:
            if show_violations:
                logger.warning("k=%.6g is below k_star=%.6g: energy inequality fails",
                               modulation.k, ledger.k_star)
            else:
                ok = False
        members.append({
            "k": modulation.k,
            "f0": modulation.f0,
            "nu": modulation.nu,
            "admissible": bool(admissible),
            "margins": [{"t": float(t), "margin": float(m)}
                        for t, m in zip(times, np.atleast_1d(margins))],
            "max_residual": residual["max_norm"],
        })
    separations = []
    t_sep = 1/ledger.k_star
    for i, first in enumerate(modulations):
        for second in modulations[i + 1:]:
            distance = family_separation(ledger, first.k, second.k, t_sep,
                                         first.f0, second.f0)
            separations.append({"k1": first.k, "k2": second.k, "t": t_sep,
                                "distance": float(distance)})
    summary = {**ledger.to_dict(), "members": members, "separations": separations}
    if direct_levels is not None and separations:
        closed = separations[0]["distance"]
        direct = direct_separation(handle, modulations[0], modulations[1], t_sep,
                                   direct_levels, theta_factor)
        relative = abs(direct - closed)/closed if closed > 0. else abs(direct)
        passed = relative <= DIRECT_SEPARATION_TOLERANCE
        if not passed:
            logger.warning("Direct separation %.6g differs from %.6g by %.2e",
                           direct, closed, relative)
        ok = ok and passed
        summary["direct_separation"] = {"closed_form": closed, "quadrature": direct,
                                        "relative": float(relative), "passed": passed}
    summary["verdict"] = "pass" if ok else "fail"
    return summary


def energy_rows(ledger, modulations, count=101):
    """Plot-ready rows ``(t, k, norm, margin)`` on ``[0, 10/k_star]``."""
    times = np.linspace(0., 10/ledger.k_star, count)
    rows = []
    for modulation in modulations:
        norm = energy_norm(ledger, modulation, times)
        margin = energy_inequality_margin(ledger, modulation.k, times, modulation.f0)
        rows.append(np.column_stack([times, np.full(count, modulation.k), norm, margin]))
    return np.concatenate(rows)
