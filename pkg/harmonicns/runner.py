"""Command line front end of HarmonicNS.

Each command writes its JSON/CSV outputs into the output directory together
with ``manifest.json``. Exit codes: 0 when every verdict passes, 2 for invalid
configuration, 3 for solver failures and 4 for failed verifications.

"""
import argparse
import json
import logging
import sys
import time

import numpy as np

from harmonicns.analysis import harmonic, inequalities, sobolev
from harmonicns.core import constants
from harmonicns.core.config import RunConfig
from harmonicns.core.errors import (
    ConfigError,
    HarmonicNSError,
    SolverError,
)
from harmonicns.core.reports import FAIL, PASS, RunManifest
from harmonicns.flow import nonuniqueness
from harmonicns.geometry import checks, hyperbolic
from harmonicns.strip import bvp

logger = logging.getLogger(__name__)

# Coarsest grid of the manufactured convergence table, refined twice.
CONVERGENCE_GRID = (97, 17)
COMPARISON_SLACK = 1.05


def _verdict(ok):
    return PASS if ok else FAIL


class Session:
    """Config, manifest and the artifacts shared between commands.

    Args:
        config (RunConfig): Validated config.
        manifest (RunManifest): Output bookkeeping.

    """

    def __init__(self, config, manifest):
        self.config = config
        self.manifest = manifest
        self._field = None
        self._handle = None
        self._report = None

    @property
    def grid(self):
        grid = self.config.grid
        return bvp.StripGrid(grid.R, grid.n_r, grid.n_s)

    def field(self):
        """Solution for the configured profile, solved once."""
        if self._field is None:
            self._field = bvp.solve_bvp(self.grid, self.config.profile.profile())
        return self._field

    def handle(self):
        if self._handle is None:
            self._handle = harmonic.HarmonicFieldHandle(self.field())
        return self._handle

    def report(self):
        """Sobolev report of the configured field, computed once."""
        if self._report is None:
            if self.config.profile.profile().is_trivial:
                raise ConfigError("profile", "the zero profile gives no nontrivial field")
            self._report = sobolev.sobolev_report(
                self.handle(), self.config.quadrature_levels,
                self.config.theta_factor, self.config.convergence_threshold)
        return self._report


def cmd_geometry_check(session, jet_factory=hyperbolic.geometry_jet):
    """Run the geometry property checks and write ``geometry.json``."""
    results = checks.geometry_checks(session.config.samples, session.config.seed,
                                     jet_factory)
    ok = all(result["passed"] for result in results)
    failed = [result["name"] for result in results if not result["passed"]]
    session.manifest.write_json("geometry.json", {
        "checks": results, "failed": failed, "verdict": _verdict(ok)})
    return _verdict(ok)


def cmd_solve(session):
    """Solve the strip problem, write the field and the convergence table."""
    config = session.config
    grid = session.grid
    if config.manufactured:
        field = bvp.solve_bvp(
            grid,
            v0=lambda r: bvp.manufactured_solution(r, constants.HALF_PI),
            forcing=bvp.manufactured_forcing,
            side=bvp.manufactured_solution,
        )
    else:
        field = session.field()
    residual = bvp.apply_operator(field)
    neumann = bvp.neumann_residual(field)
    table = bvp.convergence_study(bvp.StripGrid(grid.R, *CONVERGENCE_GRID))
    ratios = [row["ratio"] for row in table[1:]]
    summary = {
        "grid": {"R": grid.R, "n_r": grid.n_r, "n_s": grid.n_s},
        "mode": "manufactured" if config.manufactured else "profile",
        "max_residual": float(np.max(abs(residual))),
        "neumann_residual": neumann,
        "decay_constant": bvp.decay_constant(field),
        "convergence": table,
    }
    ok = neumann <= constants.NEUMANN_TOLERANCE and all(3.2 <= q <= 4.8 for q in ratios)
    profile = config.profile.profile()
    if not config.manufactured and profile.kind in ("gaussian", "exp-decay"):
        bound = bvp.comparison_bound(field)
        p_top = inequalities.SupersolutionPolynomial().top_value
        applies = profile.amplitude > 0. and profile.comparison_ratio(grid.r, p_top) <= 1.
        bound["applies"] = bool(applies)
        if applies:
            bound["passed"] = bool(bound["min_value"] > 0.
                                   and bound["max_ratio"] <= COMPARISON_SLACK)
            ok = ok and bound["passed"]
        summary["comparison"] = bound
    summary["verdict"] = _verdict(ok)
    rows = bvp.field_rows(field)
    session.manifest.write_csv("field.csv", ("r", "s", "v", "residual"), rows)
    session.manifest.write_csv("residual.csv", ("r", "s", "residual"), rows[:, [0, 1, 3]])
    session.manifest.write_json("solve.json", summary)
    return _verdict(ok)


def cmd_verify_supersolution(session):
    """Certify the supersolution inequality and the positivity of p."""
    config = session.config
    supersolution = inequalities.verify_supersolution(config.supersolution_samples)
    positivity = inequalities.verify_positivity_p()
    ceiling = inequalities.delta_ceiling(constants.SUPERSOLUTION_COEFFICIENTS)
    ok = supersolution.passed and positivity.passed
    session.manifest.write_json("supersolution.json", {
        "reports": [supersolution.to_dict(), positivity.to_dict()],
        "exploration": {
            "quartic_delta_ceiling": ceiling,
            "quadratic_family": inequalities.quadratic_family_ceiling(),
        },
        "verdict": _verdict(ok),
    })
    return _verdict(ok)


def cmd_verify_psi(session):
    """Fit the corner growth for every configured delta and check f1 <= 2."""
    config = session.config
    reports = [inequalities.verify_lemma_psi(delta, config.psi_samples)
               for delta in config.psi_deltas]
    reports.append(inequalities.verify_f1(config.f1_samples, config.seed))
    ok = all(report.passed for report in reports)
    session.manifest.write_json("psi.json", {
        "reports": [report.to_dict() for report in reports],
        "verdict": _verdict(ok),
    })
    return _verdict(ok)


def cmd_norms(session):
    """Sobolev norms, pointwise bounds and independence of shifted profiles."""
    config = session.config
    report = session.report()
    handle = session.handle()
    first, second = harmonic.verify_pointwise_bounds(handle, config.samples, config.seed)
    _, jets = handle.sample_jets(config.samples, config.seed)
    session.manifest.write_csv("jets.csv", harmonic.JET_COLUMNS, harmonic.jet_rows(jets))
    session.manifest.write_csv("cells.csv",
                               ("rho_lo", "rho_hi", "alpha_lo", "alpha_hi", "value"),
                               sobolev.cell_rows(handle, 0))

    handles = [harmonic.HarmonicFieldHandle(bvp.solve_bvp(session.grid, profile))
               for profile in config.profile.independent_profiles()]
    gram = sobolev.gram_matrix(handles, config.quadrature_levels - 1, config.theta_factor)
    normalized = np.linalg.det(gram)/np.prod(np.diag(gram))
    independent = bool(normalized > 1e-6)
    ok = report.converged and first.passed and second.passed and independent
    session.manifest.write_json("norms.json", {
        **report.to_dict(),
        "pointwise_bounds": [first.to_dict(), second.to_dict()],
        "independence": {"shifts": list(config.profile.shifts), "gram": gram,
                         "normalized_determinant": float(normalized),
                         "independent": independent},
        "verdict": _verdict(ok),
    })
    return _verdict(ok)


def cmd_nonuniqueness(session):
    """Assemble the modulated family and check energy inequality and residuals."""
    config = session.config
    ledger = nonuniqueness.energy_ledger(session.report())
    modulations = [nonuniqueness.ExponentialModulation(config.f0, m*ledger.k_star, config.nu)
                   for m in config.k]
    handle = session.handle()
    probes = nonuniqueness.probe_points(handle, config.probes, config.seed)
    summary = nonuniqueness.family_summary(
        ledger, handle, modulations, probes=probes,
        show_violations=config.show_violations,
        direct_levels=config.quadrature_levels, theta_factor=config.theta_factor)
    session.manifest.write_json("family.json", summary)
    session.manifest.write_csv("energy.csv", ("t", "k", "norm", "margin"),
                               nonuniqueness.energy_rows(ledger, modulations))
    return summary["verdict"]


COMMANDS = {
    "geometry-check": cmd_geometry_check,
    "solve": cmd_solve,
    "verify-supersolution": cmd_verify_supersolution,
    "verify-psi": cmd_verify_psi,
    "norms": cmd_norms,
    "nonuniqueness": cmd_nonuniqueness,
}


def run(session, command):
    """Run one command, or all of them in order for ``"all"``."""
    names = list(COMMANDS) if command == "all" else [command]
    for name in names:
        start = time.perf_counter()
        logger.info("Running %s", name)
        verdict = COMMANDS[name](session)
        session.manifest.record(name, verdict, time.perf_counter() - start)
    session.manifest.write()
    return session.manifest.passed


def _float_list(text):
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from error


def build_parser():
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="harmonicns",
        description="Harmonic fields on a warped product and the nonunique "
                    "Navier-Stokes solutions they generate.",
    )
    parser.add_argument("command", choices=list(COMMANDS) + ["all"])
    parser.add_argument("--config", help="JSON config document")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--grid-R", dest="grid_R", type=float)
    parser.add_argument("--grid-nr", dest="grid_nr", type=int)
    parser.add_argument("--grid-ns", dest="grid_ns", type=int)
    parser.add_argument("--profile", help="boundary profile kind")
    parser.add_argument("--delta", type=_float_list, help="comma separated decay rates")
    parser.add_argument("--k", type=_float_list, help="comma separated multiples of k_star")
    parser.add_argument("--nu", type=float)
    parser.add_argument("--f0", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int, help="pointwise sample count")
    parser.add_argument("--no-theta-factor", action="store_true")
    parser.add_argument("--show-violations", action="store_true")
    parser.add_argument("--manufactured", action="store_true",
                        help="solve the manufactured problem")
    parser.add_argument("--record-timings", action="store_true")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args):
    """Apply flags over the JSON document over the defaults and validate."""
    config = RunConfig.from_json(args.config) if args.config else RunConfig()
    config = config.with_overrides({
        "output_dir": args.out,
        "grid.R": args.grid_R,
        "grid.n_r": args.grid_nr,
        "grid.n_s": args.grid_ns,
        "profile.kind": args.profile,
        "psi_deltas": args.delta,
        "k": args.k,
        "nu": args.nu,
        "f0": args.f0,
        "seed": args.seed,
        "samples": args.samples,
        "theta_factor": False if args.no_theta_factor else None,
        "show_violations": True if args.show_violations else None,
        "manufactured": True if args.manufactured else None,
        "record_timings": True if args.record_timings else None,
    })
    return config.validate()


def exit_code(error):
    """Exit code for a package error."""
    if isinstance(error, ConfigError):
        return constants.EXIT_CONFIG
    if isinstance(error, SolverError):
        return constants.EXIT_SOLVER
    return constants.EXIT_VERIFICATION


def main(argv=None):
    """Main script execution function."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(args)
        manifest = RunManifest(config, config.output_dir, config.record_timings)
        passed = run(Session(config, manifest), args.command)
    except HarmonicNSError as error:
        logger.error("%s: %s", type(error).__name__, error)
        sys.stderr.write(json.dumps({"error": type(error).__name__,
                                     "message": str(error),
                                     "command": args.command}) + "\n")
        return exit_code(error)
    return constants.EXIT_OK if passed else constants.EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
