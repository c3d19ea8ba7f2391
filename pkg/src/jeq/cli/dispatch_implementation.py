"""
Command line front end.

    jeq [-v] identities CONFIG
    jeq [-v] subsolution CONFIG
    jeq [-v] solve CONFIG [--monitor]
    jeq [-v] monitor CONFIG
    jeq [-v] convergence CONFIG [--trend]

Reports go to stdout as JSON, logs to stderr. The exit status is 0 on success
and otherwise the exit_code of the failure (2 numerical, 3 input).
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from jeq.chern_geometry.commutation_residuals_implementation import identity_suite
from jeq.cli.emit_report_implementation import emit_report
from jeq.cli.parse_config_implementation import ProblemConfig, parse_config
from jeq.errors import ConfigError, InputError, IoError, JeqError, NumericalError, SubsolutionViolation
from jeq.pointwise_algebra.j_operator_implementation import j_operator
from jeq.pointwise_algebra.relative_spectrum_implementation import batched_relative_spectrum
from jeq.pointwise_algebra.subsolution_check_implementation import cone_margin, subsolution_margin
from jeq.solver.estimate_monitor_implementation import estimate_monitor
from jeq.solver.evaluate_implementation import initial_state
from jeq.solver.manufactured_implementation import boundary_trend, convergence_study, manufactured_config
from jeq.solver.solve_closed_implementation import solve_closed
from jeq.solver.solve_dirichlet_implementation import solve_dirichlet
from jeq.solver.solve_state_implementation import Problem
from jeq.torus_discretization.field_io_implementation import write_field
from jeq.torus_discretization.grid_implementation import ScalarField
from jeq.torus_discretization.residual_field_implementation import gfrak_field

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("identities", "subsolution", "solve", "monitor", "convergence")
LOG_FORMAT = "%(name)s:%(levelname)s:%(message)s"
# admissibility cutoff shared with the pointwise checks
SPECTRUM_FLOOR = 1e-14


class SubsolutionReport(BaseModel):
    """Pointwise subsolution and cone conditions of chi + Hess(usub) over the equation points."""
    points: int
    passed: bool
    cone_passed: bool
    violations: int
    min_margin: Optional[float] = None
    min_cone_margin: Optional[float] = None
    first_violation: Optional[List[int]] = None
    first_violation_kind: Optional[str] = None


def configure_logging(verbosity: int) -> None:
    """0 -> WARNING, 1 -> INFO, 2 or more -> DEBUG, always to stderr."""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(format=LOG_FORMAT, level=level, force=True)


class JeqArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with the input-error exit status."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(InputError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = JeqArgumentParser(prog="jeq", description="J-equation solver and verifier.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("identities", help="commutation identities over the metric catalog").add_argument("config")
    sub.add_parser("subsolution", help="subsolution and cone conditions over a field").add_argument("config")
    solve = sub.add_parser("solve", help="solve the closed or Dirichlet problem")
    solve.add_argument("config")
    solve.add_argument("--monitor", action="store_true", help="also write the estimate report")
    sub.add_parser("monitor", help="estimate report for a saved solution").add_argument("config")
    convergence = sub.add_parser("convergence", help="manufactured problem at two or more resolutions")
    convergence.add_argument("config")
    convergence.add_argument("--trend", action="store_true", help="also run the boundary-data family")
    return parser


def _output_dir(config: ProblemConfig) -> str:
    try:
        os.makedirs(config.output, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {config.output}: {exc}") from exc
    return config.output


def _required(config: ProblemConfig, key: str, why: str):
    value = getattr(config.fields, key)
    if value is None:
        raise ConfigError(f"required {why}", key=key)
    return value


def _subsolution_field(config: ProblemConfig) -> ScalarField:
    fields = config.fields
    return fields.usub if fields.usub is not None else ScalarField.constant(fields.grid, 0.0)


def run_identities(config: ProblemConfig, flags: argparse.Namespace) -> int:
    report = identity_suite(
        n_values=config.identity_n,
        entries=config.entries,
        points=config.identity_points,
        seed=config.seed,
    )
    emit_report(report)
    if not report.passed:
        logger.error("identity residuals above tolerance: %s", report.max_scaled_residuals)
        return NumericalError.exit_code
    return 0


def subsolution_report(config: ProblemConfig) -> SubsolutionReport:
    """
    Evaluates both pointwise conditions at every equation point.

    A point where chi + Hess(usub) is not positive counts as a violation of
    both conditions; the first violation is the first such point in grid order.
    """
    fields = config.fields
    psi = _required(config, "psi", "for the subsolution check")
    grid = fields.grid
    gfrak, _ = gfrak_field(fields.chi, _subsolution_field(config), fields.g)
    mask = grid.interior_mask
    lam = batched_relative_spectrum(gfrak.values[mask], fields.g.values[mask])
    positive = lam[..., -1] > SPECTRUM_FLOOR
    margin = np.full(lam.shape[0], -np.inf)
    cone = np.full(lam.shape[0], -np.inf)
    margin[positive] = subsolution_margin(lam[positive], psi.values[mask][positive])
    cone[positive] = cone_margin(lam[positive], psi.values[mask][positive])

    failed = margin < 0
    report = SubsolutionReport(
        points=int(lam.shape[0]),
        passed=not bool(failed.any()),
        cone_passed=bool(np.all(cone > 0)),
        violations=int(np.count_nonzero(failed)),
        min_margin=float(np.min(margin[positive])) if positive.any() else None,
        min_cone_margin=float(np.min(cone[positive])) if positive.any() else None,
    )
    if failed.any():
        first = int(np.argmax(failed))
        index = np.argwhere(mask)[first]
        report.first_violation = [int(i) for i in index]
        report.first_violation_kind = "not positive" if not positive[first] else "subsolution"
    return report


def run_subsolution(config: ProblemConfig, flags: argparse.Namespace) -> int:
    report = subsolution_report(config)
    emit_report(report)
    if not report.passed:
        logger.error("subsolution fails at %s (%s)", report.first_violation, report.first_violation_kind)
        return SubsolutionViolation.exit_code
    return 0


def run_solve(config: ProblemConfig, flags: argparse.Namespace) -> int:
    fields = config.fields
    cfg = config.solver
    if fields.grid.periodic:
        psi = None
        state, diag = solve_closed(fields.chi, fields.g, cfg, u0=fields.u, usub=fields.usub)
    else:
        usub = _required(config, "usub", "on box grids")
        psi = _required(config, "psi", "on box grids")
        phi = fields.phi if fields.phi is not None else usub
        state, diag = solve_dirichlet(fields.chi, fields.g, psi, phi, usub, cfg, u0=fields.u)

    out = _output_dir(config)
    write_field(os.path.join(out, "u.csv"), state.u)
    emit_report(state.log_records(), path=os.path.join(out, "convergence.json"))
    emit_report(state.log_records(), "csv", os.path.join(out, "convergence.csv"), columns=("iter", "residual"))
    summary = {
        "c": state.c,
        "residual_norm": state.residual_norm,
        "positivity_margin": state.positivity_margin,
        "iterations": state.iterations,
        "path": state.path,
        "diagnostics": diag.report(),
    }
    if flags.monitor:
        report = estimate_monitor(
            state, _subsolution_field(config), fields.chi, fields.g, psi, config.A_grad, config.A_hess, cfg
        )
        emit_report(report, path=os.path.join(out, "estimate.json"))
        summary["estimate"] = report.report()
    emit_report(summary)
    return 0


def run_monitor(config: ProblemConfig, flags: argparse.Namespace) -> int:
    fields = config.fields
    u = _required(config, "u", "saved solution to monitor")
    if fields.grid.periodic:
        psi = None
        problem = Problem(fields.chi, fields.g)
        gfrak, margin = gfrak_field(fields.chi, u, fields.g)
        # a solution has constant trace, its grid average recovers c
        c = float(np.mean(j_operator(gfrak.values, fields.g.values))) if margin > 0 else float(fields.grid.n)
    else:
        psi = _required(config, "psi", "on box grids")
        problem = Problem(fields.chi, fields.g, psi, fields.phi if fields.phi is not None else u)
        c = None
    state = initial_state(problem, u, c)
    report = estimate_monitor(
        state, _subsolution_field(config), fields.chi, fields.g, psi, config.A_grad, config.A_hess, config.solver
    )
    emit_report(report, path=os.path.join(_output_dir(config), "estimate.json"))
    emit_report(report)
    return 0


def run_convergence(config: ProblemConfig, flags: argparse.Namespace) -> int:
    # keys set in the problem file override the manufactured defaults
    cfg = manufactured_config(**config.solver.model_dump(exclude_unset=True))
    report = convergence_study(points=config.convergence_points, cfg=cfg)
    out = _output_dir(config)
    emit_report(report, "csv", os.path.join(out, "convergence_study.csv"), columns=("spacing", "sup_error"))
    record = {"convergence": report.model_dump()}
    if flags.trend:
        trend = boundary_trend(scales=config.trend_scales, points=config.trend_points, cfg=cfg)
        record["trend"] = trend.model_dump()
    for ratio in report.error_ratio:
        logger.info("sup-error ratio %.3f", ratio)
    emit_report(record)
    return 0


HANDLERS = {
    "identities": run_identities,
    "subsolution": run_subsolution,
    "solve": run_solve,
    "monitor": run_monitor,
    "convergence": run_convergence,
}


def dispatch(subcommand: str, config: ProblemConfig, flags: argparse.Namespace) -> int:
    """
    Runs one subcommand and maps any jeq failure to its exit code.

    Returns:
        0 on success, otherwise the exit_code of the error raised.
    """
    if subcommand not in HANDLERS:
        raise ValueError(f"unknown subcommand {subcommand}; choose from {', '.join(SUBCOMMANDS)}")
    try:
        return HANDLERS[subcommand](config, flags)
    except JeqError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    flags = build_parser().parse_args(argv)
    configure_logging(flags.verbose)
    try:
        config = parse_config(flags.config)
    except JeqError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    return dispatch(flags.subcommand, config, flags)
