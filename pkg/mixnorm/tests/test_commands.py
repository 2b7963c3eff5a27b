import csv
import io
import json
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from mixnorm.mixed_grid import Grid, GridFunction, save_grid_function
from mixnorm.models import ExperimentRun
from mixnorm.tests.utils import gaussian

SMALL_ENV = """\
grid.dims = 32,32
grid.extents = 4,4
ensemble.count = 3
checks.samples = 50
checks.fibers = 5
checks.fiber_length = 64
J_audit = 2
"""


class CommandTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write_config(self, extra="", name="run.env"):
        path = self.dir / name
        path.write_text(SMALL_ENV + extra)
        return str(path)

    def run_command(self, *args, **options):
        out = io.StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def assertExitCode(self, code, *args, **options):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(*args, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class CheckInvariantsCommandTests(CommandTestCase):
    def test_passes_on_small_config(self):
        report = json.loads(self.run_command("check_invariants", config=self.write_config()))
        self.assertTrue(report["passed"])
        self.assertEqual(report["command"], "check_invariants")
        self.assertEqual(report["schema"], 1)
        self.assertTrue(all(check["passed"] for check in report["report"]))

    def test_non_admissible_t_fails(self):
        error = self.assertExitCode(1, "check_invariants", config=self.write_config("t = 1.5,2\n"), only=["chain"])
        self.assertIn("chain", str(error))

    def test_bad_configuration(self):
        self.assertExitCode(2, "check_invariants", config=self.write_config("grid.dims = 33,32\n"))
        self.assertExitCode(2, "check_invariants", config=self.write_config("colour = blue\n"))
        self.assertExitCode(2, "check_invariants", config=str(self.dir / "missing.env"))

    def test_reruns_are_byte_identical(self):
        config = self.write_config()
        first, second = self.dir / "a.json", self.dir / "b.json"
        self.run_command("check_invariants", config=config, out=str(first), only=["holder", "chain"])
        self.run_command("check_invariants", config=config, out=str(second), only=["holder", "chain"])
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_seed_override(self):
        report = json.loads(self.run_command("check_invariants", config=self.write_config(), seed=11, only=["scaling"]))
        self.assertEqual(report["config"]["seed"], 11)

    def test_csv_output(self):
        text = self.run_command("check_invariants", config=self.write_config(), format="csv", only=["threshold", "symmetry"])
        rows = list(csv.reader(io.StringIO(text)))
        self.assertEqual(rows, [["check", "passed"], ["symmetry", "1"], ["threshold", "1"]])


class AuditCommandTests(CommandTestCase):
    def test_bracket_audit(self):
        report = json.loads(self.run_command("audit", "bracket(xi)^2", config=self.write_config("alpha = 2\nt = 2,2\n"), points=16))
        self.assertTrue(report["passed"])
        self.assertEqual(set(report["report"]["reports"]), {"linf", "l2", "lmixed"})
        self.assertEqual(report["report"]["verdict"], "theorem-certified")

    def test_singular_symbol_fails(self):
        self.assertExitCode(1, "audit", "1/xi1", config=self.write_config(), points=16)

    def test_syntax_error_is_usage(self):
        self.assertExitCode(2, "audit", "bracket(xi", config=self.write_config(), points=16)

    def test_saved_run_is_tagged(self):
        self.run_command("audit", config=self.write_config(), points=16, save=True)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.command, "audit")
        self.assertTrue(run.passed)
        self.assertEqual(set(run.tags.names()), {"audit", "theorem-certified", "literal-shells"})
        self.assertIn("reports", run.report)


class ExperimentCommandTests(CommandTestCase):
    def test_lifting_experiment(self):
        config = self.write_config("alpha = 1\nexperiment.kind = lifting\n")
        report = json.loads(self.run_command("experiment", config=config, points=16))
        self.assertTrue(report["passed"])
        self.assertEqual(len(report["report"]["forward"]["members"]), 3)
        self.assertIsNotNone(report["report"]["inverse"])

    def test_csv_rows(self):
        out = self.dir / "plot.csv"
        self.run_command("experiment", config=self.write_config(), format="csv", out=str(out))
        rows = list(csv.reader(io.StringIO(out.read_text())))
        self.assertEqual(rows[0], ["series", "x", "y"])
        self.assertEqual(len(rows), 4)

    def test_sobolev_run_with_fractional_orders_is_usage(self):
        config = self.write_config("a = 1,2\ns = 1\nalpha = 1\ngrid.extents = 4,1\nexperiment.kind = sobolev\n")
        error = self.assertExitCode(2, "experiment", config=config, points=16)
        self.assertIn("not a nonnegative integer", str(error))

    def test_flagged_members_fail_the_run(self):
        config = self.write_config("J = 1\nalpha = 1\nexperiment.kind = lifting\n")
        error = self.assertExitCode(1, "experiment", config=config, points=16)
        self.assertIn("6 members flagged", str(error))

    def test_rational_experiment(self):
        config = self.write_config("alpha = 1\nkind = gen_sobolev\nexperiment.kind = rational\n")
        report = json.loads(self.run_command("experiment", config=config, points=16))
        self.assertTrue(report["passed"])
        self.assertEqual(report["report"]["flagged_count"], 0)


class NormCommandTests(CommandTestCase):
    def test_norm_of_input(self):
        grid = Grid((32, 32), (4.0, 4.0))
        path = self.dir / "bump"
        save_grid_function(GridFunction(gaussian(grid), grid), path)
        export = self.dir / "family"
        report = json.loads(
            self.run_command("norm", config=self.write_config(), kind="besov", input=str(path), export_family=str(export))
        )
        self.assertGreater(report["report"]["value"], 0)
        self.assertEqual(report["report"]["J"], 2)
        self.assertTrue((export / "level_00.bin").exists())

    def test_sobolev_needs_integral_orders(self):
        config = self.write_config("a = 1,2\ns = 1\ngrid.extents = 4,1\n")
        self.assertExitCode(2, "norm", config=config, kind="sobolev")

    def test_gen_sobolev_without_input(self):
        report = json.loads(self.run_command("norm", config=self.write_config("s = 0.5\n"), kind="gen_sobolev"))
        self.assertIsNone(report["report"]["J"])
        self.assertTrue(np.isfinite(report["report"]["value"]))
