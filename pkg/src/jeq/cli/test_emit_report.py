import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

from jeq.cli.emit_report_implementation import emit_report, render_report
from jeq.errors import IoError
from jeq.solver.estimate_monitor_implementation import estimate_monitor
from jeq.solver.solve_closed_implementation import solve_closed
from jeq.solver.solve_state_implementation import EstimateReport, SolveConfig, StepRecord
from jeq.torus_discretization.expression_implementation import hermitian_field
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


class EmitReportTest(unittest.TestCase):
    """
    Unit tests for JSON and two-column CSV report output.
    """

    @classmethod
    def setUpClass(cls):
        grid = Grid.uniform(2, 6)
        cls.g = HermitianField.identity(grid)
        cls.chi = hermitian_field("2.0 + ddbar(0.04*sin(2*pi*x1)*cos(2*pi*y1))", grid)
        cls.zero = ScalarField.constant(grid, 0.0)
        cls.state, _ = solve_closed(cls.chi, cls.g, SolveConfig())

    def test_convergence_log_as_csv(self):
        text = render_report(self.state.log_records(), "csv", columns=("iter", "residual"))
        lines = text.splitlines()
        self.assertEqual(lines[0], "# iter,residual")
        rows = [line.split(",") for line in lines[1:]]
        self.assertEqual(len(rows), self.state.iterations)
        residuals = [float(r[1]) for r in rows]
        self.assertTrue(all(b < a for a, b in zip(residuals, residuals[1:])))
        self.assertEqual([int(r[0]) for r in rows], list(range(1, len(rows) + 1)))

    def test_parallel_lists_as_csv(self):
        text = render_report({"spacing": [0.125, 0.0625], "sup_error": [4e-3, 1e-3]}, "csv",
                             columns=("spacing", "sup_error"))
        self.assertEqual(text, "# spacing,sup_error\n0.125,0.004\n0.0625,0.001\n")

    def test_estimate_report_round_trips(self):
        report = estimate_monitor(self.state, self.zero, self.chi, self.g)
        data = json.loads(render_report(report))
        for name in EstimateReport.model_fields:
            self.assertIn(name, data)
        self.assertEqual(EstimateReport.model_validate(data), report)

    def test_identical_bytes(self):
        records = [StepRecord(iter=1, residual=0.5, step=1.0, margin=1.0, krylov_iters=3)]
        self.assertEqual(render_report(records), render_report(list(records)))
        self.assertEqual(json.loads(render_report(records))[0]["krylov_iters"], 3)

    def test_stdout_and_file(self):
        with patch("sys.stdout", new_callable=io.StringIO) as out:
            emit_report({"b": 1, "a": 2})
        self.assertEqual(out.getvalue(), '{\n  "a": 2,\n  "b": 1\n}\n')
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "report.json")
            emit_report({"a": 2}, path=path)
            with open(path) as handle:
                self.assertEqual(json.load(handle), {"a": 2})

    def test_unwritable_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(IoError):
                emit_report({"a": 1}, path=os.path.join(tmp, "missing", "report.json"))

    def test_csv_needs_two_columns(self):
        with self.assertRaises(ValueError):
            render_report([{"iter": 1}], "csv", columns=("iter",))


if __name__ == "__main__":
    unittest.main()
