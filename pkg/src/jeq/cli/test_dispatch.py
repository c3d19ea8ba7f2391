import argparse
import io
import json
import logging
import os
import tempfile
import unittest
from unittest.mock import patch

from jeq.cli.dispatch_implementation import build_parser, configure_logging, dispatch, subsolution_report
from jeq.cli.parse_config_implementation import parse_config
from jeq.errors import StepFailure
from jeq.solver.manufactured_implementation import MANUFACTURED_RTOL, ConvergenceReport


class DispatchTest(unittest.TestCase):
    """
    Unit tests for subcommand dispatch and exit codes.
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def config(self, text):
        path = os.path.join(self.tmp.name, "problem.cfg")
        with open(path, "w") as handle:
            handle.write(f"output = {self.tmp.name}\n" + text)
        return parse_config(path)

    def run_command(self, subcommand, config, **flags):
        defaults = {"monitor": False, "trend": False}
        defaults.update(flags)
        namespace = argparse.Namespace(**defaults)
        with patch("sys.stdout", new_callable=io.StringIO) as out:
            code = dispatch(subcommand, config, namespace)
        return code, out.getvalue()

    def test_subsolution_passes_for_flat_background(self):
        config = self.config("n = 2\nshape = 4,4,4,4\nchi = 2.0\npsi = 1.0\n")
        code, out = self.run_command("subsolution", config)
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["passed"])
        self.assertTrue(report["cone_passed"])
        self.assertAlmostEqual(report["min_margin"], 1.0, delta=1e-12)
        self.assertIsNone(report["first_violation"])

    def test_subsolution_reports_first_violation(self):
        config = self.config("n = 2\nshape = 4,4,4,4\ntopology = box\nchi = 0.9\npsi = 1.0\n")
        report = subsolution_report(config)
        self.assertFalse(report.passed)
        # (0.9, 0.9) with psi = 1 separates the two conditions
        self.assertTrue(report.cone_passed)
        self.assertEqual(report.first_violation, [1, 1, 1, 1])
        self.assertEqual(report.first_violation_kind, "subsolution")
        self.assertEqual(report.violations, report.points)
        code, _ = self.run_command("subsolution", config)
        self.assertEqual(code, 2)

    def test_subsolution_flags_non_positive_points(self):
        config = self.config("n = 2\nshape = 4,4,4,4\nchi = 1.0\nusub = 0.5*sin(2*pi*x1)\npsi = 0.9\n")
        report = subsolution_report(config)
        self.assertFalse(report.passed)
        self.assertFalse(report.cone_passed)
        self.assertEqual(report.first_violation_kind, "not positive")

    def test_subsolution_needs_psi(self):
        config = self.config("n = 2\nshape = 4,4,4,4\n")
        code, _ = self.run_command("subsolution", config)
        self.assertEqual(code, 3)

    def test_identities_small_suite(self):
        config = self.config("n = 2\nshape = 4,4,4,4\nidentity_n = 2\nidentity_points = 2\nentries = flat, product\n")
        code, out = self.run_command("identities", config)
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["passed"])
        self.assertEqual(report["entries"], ["flat", "product"])

    def test_solve_closed_writes_outputs(self):
        config = self.config("n = 2\nshape = 6,6,6,6\nchi = 2.0 + ddbar(0.04*sin(2*pi*x1))\n")
        code, out = self.run_command("solve", config, monitor=True)
        self.assertEqual(code, 0)
        summary = json.loads(out)
        self.assertLessEqual(summary["residual_norm"], 1e-10)
        for name in ("u.csv", "convergence.json", "convergence.csv", "estimate.json"):
            self.assertTrue(os.path.exists(os.path.join(self.tmp.name, name)), name)
        with open(os.path.join(self.tmp.name, "convergence.json")) as handle:
            log = json.load(handle)
        self.assertEqual(len(log), summary["iterations"])
        self.assertEqual(sorted(log[0]), ["iter", "krylov_iters", "margin", "residual", "step"])

    def test_box_solve_needs_subsolution(self):
        config = self.config("n = 2\nshape = 6,6,6,6\ntopology = box\npsi = 1.5\n")
        code, _ = self.run_command("solve", config)
        self.assertEqual(code, 3)

    def test_numerical_failure_exit_code(self):
        config = self.config("n = 2\nshape = 6,6,6,6\nchi = 2.0 + ddbar(0.04*sin(2*pi*x1))\n")
        with patch("jeq.cli.dispatch_implementation.solve_closed", side_effect=StepFailure("stalled")):
            with self.assertLogs("jeq.cli.dispatch_implementation", level="ERROR") as logs:
                code, _ = self.run_command("solve", config)
        self.assertEqual(code, 2)
        self.assertIn("StepFailure: stalled", logs.output[0])

    def test_convergence_uses_solver_keys(self):
        config = self.config("n = 2\nshape = 4,4,4,4\nconvergence_points = 7\ntrend_scales = 1.0\nnewton_tol = 1e-9\n")
        report = ConvergenceReport(
            points=[7], spacing=[1.0 / 6], sup_error=[1e-3], error_ratio=[],
            diagnostic_max=[1e-2], diagnostic_ratio=[], newton_steps=[4],
        )
        with patch("jeq.cli.dispatch_implementation.convergence_study", return_value=report) as study, \
                patch("jeq.cli.dispatch_implementation.boundary_trend") as trend:
            trend.return_value.model_dump.return_value = {}
            code, out = self.run_command("convergence", config, trend=True)
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["convergence"]["points"], [7])
        cfg = study.call_args.kwargs["cfg"]
        self.assertEqual(cfg.newton_tol, 1e-9)
        self.assertEqual(cfg.subsolution_rtol, MANUFACTURED_RTOL)
        self.assertIs(trend.call_args.kwargs["cfg"], cfg)
        self.assertEqual(study.call_args.kwargs["points"], [7])

    def test_unknown_subcommand(self):
        config = self.config("n = 2\nshape = 4,4,4,4\n")
        with self.assertRaises(ValueError):
            dispatch("plot", config, argparse.Namespace())

    def test_parser_flags(self):
        flags = build_parser().parse_args(["-vv", "solve", "problem.cfg", "--monitor"])
        self.assertEqual((flags.verbose, flags.subcommand, flags.monitor), (2, "solve", True))
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as ctx:
                build_parser().parse_args(["plot", "problem.cfg"])
            self.assertEqual(ctx.exception.code, 3)
            with self.assertRaises(SystemExit) as ctx:
                build_parser().parse_args(["solve", "problem.cfg", "--trend"])
            self.assertEqual(ctx.exception.code, 3)

    def test_verbosity_levels(self):
        self.addCleanup(configure_logging, 0)
        configure_logging(1)
        self.assertEqual(logging.getLogger().level, logging.INFO)
        configure_logging(3)
        self.assertEqual(logging.getLogger().level, logging.DEBUG)


if __name__ == "__main__":
    unittest.main()
