import json
import math
import os
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, TestCase
from rest_framework import serializers

from mixnorm.experiments import AuditResult
from mixnorm.models import ExperimentRun
from mixnorm.multipliers import L2, ConditionReport, LocalizedValue
from reports.config import load_config, read_raw
from reports.serializers import ExperimentConfigSerializer, envelope, plain
from reports.writers import audit_rows, render_csv, render_json

SECTIONS = {"grid": {}, "ensemble": {}, "experiment": {}, "checks": {}}


def validate(**values):
    serializer = ExperimentConfigSerializer(data={**SECTIONS, **values})
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data


class ConfigSerializerTests(SimpleTestCase):
    def test_defaults(self):
        config = validate()
        self.assertEqual(config["a"], (1.0, 1.0))
        self.assertEqual(config["p"], (2.0, 2.0))
        self.assertEqual(config["grid"]["dims"], [128, 128])
        self.assertEqual(config["grid"]["extents"], [8.0, 8.0])
        self.assertEqual(config["J_audit"], 6)
        self.assertIsNone(config["t"])
        self.assertEqual(config["ensemble"]["count"], 20)
        self.assertEqual(config["experiment"]["kind"], "identity")

    def test_exponent_parsing(self):
        config = validate(a="1,2", p="2, inf", q="inf", t=[2, 1.5], kind="besov")
        self.assertEqual(config["p"], (2.0, math.inf))
        self.assertEqual(config["q"], math.inf)
        self.assertEqual(config["t"], (2.0, 1.5))

    def test_rejections(self):
        cases = [
            ({"p": [2, 2, 2]}, "p"),
            ({"q": "0"}, "q"),
            ({"a": "0.5,1"}, "a"),
            ({"p": "two"}, "p"),
            ({"grid": {"dims": [33]}}, "grid"),
            ({"p": "2,inf"}, "kind"),
            ({"seed": -1}, "seed"),
        ]
        for values, field in cases:
            serializer = ExperimentConfigSerializer(data={**SECTIONS, **values})
            self.assertFalse(serializer.is_valid(), values)
            self.assertIn(field, serializer.errors)

    def test_experiment_kinds(self):
        for kind in ("identity", "lifting", "sobolev", "gen_sobolev", "rational", "symbol"):
            self.assertEqual(validate(experiment={"kind": kind})["experiment"]["kind"], kind)
        serializer = ExperimentConfigSerializer(data={**SECTIONS, "experiment": {"kind": "fourier"}})
        self.assertFalse(serializer.is_valid())
        self.assertIn("experiment", serializer.errors)

    def test_nonpositive_width(self):
        serializer = ExperimentConfigSerializer(data={**SECTIONS, "ensemble": {"width": 0}})
        self.assertFalse(serializer.is_valid())
        self.assertIn("ensemble", serializer.errors)


class ConfigFileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text):
        path = Path(self.tmp.name) / "run.env"
        path.write_text(text)
        return str(path)

    def test_sections_from_dotted_keys(self):
        raw = read_raw(self.write("a = 1,2\ngrid.dims = 64,32\nexperiment.kind = lifting\n"))
        self.assertEqual(raw["a"], ["1", "2"])
        self.assertEqual(raw["grid"], {"dims": ["64", "32"]})
        self.assertEqual(raw["experiment"], {"kind": "lifting"})
        self.assertEqual(raw["checks"], {})

    def test_unknown_key(self):
        with self.assertRaises(serializers.ValidationError) as ctx:
            read_raw(self.write("grid.dim = 64\n"))
        self.assertIn("grid.dim", ctx.exception.detail)

    def test_environment_overrides_file(self):
        path = self.write("seed = 3\n")
        with mock.patch.dict(os.environ, {"seed": "9"}):
            self.assertEqual(load_config(path).validated_data["seed"], 9)

    def test_seed_argument_wins(self):
        self.assertEqual(load_config(self.write("seed = 3\n"), seed=4).validated_data["seed"], 4)

    def test_defaults_without_file(self):
        config = load_config().validated_data
        self.assertEqual(config["kind"], "triebel_lizorkin")
        self.assertEqual(config["checks"]["samples"], 1000)

    def test_shipped_configs_validate(self):
        root = Path(__file__).resolve().parent.parent / "configs"
        for name in ("default.env", "lifting.env", "sobolev.env"):
            load_config(str(root / name))


class RenderTests(SimpleTestCase):
    def test_plain(self):
        value = {"a": (np.float64(1.5), np.int64(2)), "b": [float("inf"), float("nan")], 3: True, "c": None}
        self.assertEqual(plain(value), {"a": [1.5, 2], "b": ["inf", "nan"], "3": True, "c": None})

    def test_envelope_is_stable(self):
        report = envelope("audit", {"seed": 0}, {"value": plain(float("inf"))}, passed=True)
        rendered = render_json(report)
        self.assertTrue(rendered.endswith(b"\n"))
        self.assertEqual(rendered, render_json(envelope("audit", {"seed": 0}, {"value": "inf"}, passed=True)))
        self.assertEqual(json.loads(rendered), {"schema": 1, "command": "audit", "passed": True, "config": {"seed": 0}, "report": {"value": "inf"}})

    def test_csv(self):
        self.assertEqual(render_csv([("x", "y"), (1, np.float64("nan"))]), b"x,y\n1,nan\n")

    def test_audit_rows(self):
        cells = (LocalizedValue((0,), 1, 1.5), LocalizedValue((1,), 1, 0.25))
        report = ConditionReport(mode=L2, alpha=0.0, N=1, J_audit=1, geometry="literal", cells=cells)
        audit = AuditResult(reports={L2: report}, threshold=2, verdict="exploratory", symbol="1")
        self.assertEqual(list(audit_rows(audit)), [("series", "x", "y"), ("l2_0", 1, 1.5), ("l2_1", 1, 0.25)])


class ExperimentRunTests(TestCase):
    def test_str_and_tags(self):
        run = ExperimentRun.objects.create(command="experiment", seed=7, passed=True)
        run.tags.add("lifting")
        self.assertEqual(str(run), "experiment (seed 7): pass")
        self.assertEqual(list(ExperimentRun.objects.filter(tags__name="lifting")), [run])
