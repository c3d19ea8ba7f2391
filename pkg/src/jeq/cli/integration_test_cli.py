import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

from jeq.cli.dispatch_implementation import main


class CliIntegrationTest(unittest.TestCase):
    """
    Problem file to solve to monitor, through the command line entry point.
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_config(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as handle:
            handle.write(text)
        return path

    def run_main(self, *argv):
        with patch("sys.stdout", new_callable=io.StringIO) as out:
            code = main(list(argv))
        return code, out.getvalue()

    def test_dirichlet_solve_then_monitor(self):
        out_dir = os.path.join(self.tmp.name, "run")
        base = (
            "n = 2\nshape = 6,6,6,6\ntopology = box\n"
            "chi = 2.0\npsi = 1.5\nusub = 0\n"
            f"output = {out_dir}\nA_grad = 2.0\n"
        )
        code, out = self.run_main("solve", self.write_config("solve.cfg", base), "--monitor")
        self.assertEqual(code, 0)
        summary = json.loads(out)
        self.assertLessEqual(summary["residual_norm"], 1e-10)
        with open(os.path.join(out_dir, "estimate.json")) as handle:
            solved_estimate = json.load(handle)
        self.assertEqual(solved_estimate["A_grad"], 2.0)

        # the saved field feeds the monitor subcommand
        monitor_cfg = self.write_config("monitor.cfg", base + "u = run/u.csv\n")
        code, out = self.run_main("monitor", monitor_cfg)
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertAlmostEqual(report["C0"], solved_estimate["C0"], delta=1e-12)
        self.assertAlmostEqual(report["grad_max"], solved_estimate["grad_max"], delta=1e-12)

        with open(os.path.join(out_dir, "convergence.csv")) as handle:
            rows = [line for line in handle.read().splitlines() if not line.startswith("#")]
        self.assertEqual(len(rows), summary["iterations"])

    def test_config_errors_exit_three(self):
        code, _ = self.run_main("solve", self.write_config("bad.cfg", "n = 2\nshape = 6,6,6,6\nnewtn_tol = 1e-9\n"))
        self.assertEqual(code, 3)
        code, _ = self.run_main("solve", os.path.join(self.tmp.name, "absent.cfg"))
        self.assertEqual(code, 3)

    def test_convergence_single_resolution(self):
        config = self.write_config(
            "conv.cfg", f"n = 2\nshape = 4,4,4,4\nconvergence_points = 7\noutput = {self.tmp.name}\n"
        )
        code, out = self.run_main("convergence", config)
        self.assertEqual(code, 0)
        report = json.loads(out)["convergence"]
        self.assertEqual(report["points"], [7])
        self.assertTrue(os.path.exists(os.path.join(self.tmp.name, "convergence_study.csv")))


if __name__ == "__main__":
    unittest.main()
