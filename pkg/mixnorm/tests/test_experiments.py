import math

import numpy as np
from django.test import SimpleTestCase

from mixnorm.exceptions import DomainError
from mixnorm.experiments import (
    GEN_SOBOLEV_RUN,
    IDENTITY,
    LIFTING,
    RATIONAL,
    SOBOLEV_RUN,
    experiment_params,
    multiplier_from,
    plot_rows,
    rng_from,
    run_audit,
    run_experiment,
    run_norm,
    stability_spread,
)
from mixnorm.mixed_grid import LITERAL
from mixnorm.multipliers import CERTIFIED, EXPLORATORY, LMIXED
from mixnorm.spaces import BESOV, GEN_SOBOLEV, SOBOLEV
from mixnorm.tests.utils import make_config


class RunExperimentTests(SimpleTestCase):
    def test_identity(self):
        result = run_experiment(make_config(), LITERAL)
        self.assertEqual(result.kind, IDENTITY)
        self.assertIsNone(result.audit)
        self.assertIsNone(result.inverse)
        self.assertEqual(len(result.forward.members), 3)
        self.assertAlmostEqual(result.equivalence_constant, 1.0, places=9)
        self.assertEqual(result.forward.verdict, EXPLORATORY)
        self.assertEqual(result.flagged_count, 0)

    def test_lifting_with_resolutions(self):
        config = make_config(
            a=[1, 2], alpha=1.0, t=[2, 2], J_audit=2,
            grid__extents=[4.0, 1.0], experiment__kind=LIFTING, experiment__resolutions=[32, 64],
        )
        result = run_experiment(config, LITERAL, points=16)
        self.assertEqual(result.audit.reports[LMIXED].mode, LMIXED)
        self.assertEqual(result.forward.verdict, CERTIFIED)
        self.assertIsNotNone(result.inverse)
        self.assertTrue(math.isfinite(result.equivalence_constant))
        self.assertEqual([row["dims"] for row in result.stability], [32, 64])
        self.assertTrue(math.isfinite(stability_spread(result.stability)))
        self.assertEqual(result.flagged_count, 0)

    def test_lifting_stable_across_resolutions(self):
        config = make_config(
            a=[1, 2], p=[2, 1.5], s=1.0, alpha=1.0, J_audit=1,
            grid__dims=[64], grid__extents=[4.0, 2.0],
            experiment__kind=LIFTING, experiment__resolutions=[64, 128, 256],
        )
        result = run_experiment(config, LITERAL, points=16)
        self.assertEqual([row["dims"] for row in result.stability], [64, 128, 256])
        self.assertLessEqual(stability_spread(result.stability), 2.0)
        self.assertEqual(result.flagged_count, 0)

    def test_sobolev_identification(self):
        config = make_config(s=1.0, alpha=1.0, experiment__kind=SOBOLEV_RUN, J_audit=1)
        result = run_experiment(config, LITERAL, points=16)
        self.assertTrue(all(0 < ratio < math.inf for ratio in result.forward.ratios))

    def test_plot_rows(self):
        rows = list(plot_rows(run_experiment(make_config(), LITERAL)))
        self.assertEqual(rows[0], ("series", "x", "y"))
        self.assertEqual([row[0] for row in rows[1:]], ["ratio"] * 3)

    def test_seed_changes_ensemble(self):
        first = run_experiment(make_config(seed=1, alpha=1.0, p=[2, 1.5], ensemble__scales=[0, 1], experiment__kind=LIFTING, J_audit=1), LITERAL, points=16)
        second = run_experiment(make_config(seed=2, alpha=1.0, p=[2, 1.5], ensemble__scales=[0, 1], experiment__kind=LIFTING, J_audit=1), LITERAL, points=16)
        self.assertNotEqual(first.forward.ratios, second.forward.ratios)

    def test_sobolev_run_needs_integral_orders(self):
        config = make_config(a=[1, 2], s=1.0, alpha=1.0, experiment__kind=SOBOLEV_RUN, J_audit=1)
        with self.assertRaises(DomainError):
            experiment_params(config)
        with self.assertRaises(DomainError):
            run_experiment(config, LITERAL, points=16)

    def test_gen_sobolev_run(self):
        config = make_config(a=[1, 2], s=1.0, alpha=1.0, grid__extents=[4.0, 1.0], experiment__kind=GEN_SOBOLEV_RUN, J_audit=1)
        self.assertEqual(experiment_params(config).kind, GEN_SOBOLEV)
        result = run_experiment(config, LITERAL, points=16)
        self.assertTrue(all(0 < ratio < math.inf for ratio in result.forward.ratios))

    def test_rational_symbol_matches_bessel_weight(self):
        config = make_config(
            a=[1, 2], alpha=1.5, kind=GEN_SOBOLEV, grid__extents=[4.0, 1.0], experiment__kind=RATIONAL, J_audit=1,
        )
        result = run_experiment(config, LITERAL, points=16)
        self.assertEqual(len(result.forward.ratios), 3)
        np.testing.assert_allclose(result.forward.ratios, 1.0, rtol=1e-10)
        self.assertEqual(multiplier_from(config).alpha, 1.5)

    def test_single_level_runs_are_flagged(self):
        result = run_experiment(make_config(J=1, alpha=1.0, experiment__kind=LIFTING, J_audit=1), LITERAL, points=16)
        self.assertEqual(result.flagged_count, 6)


class AuditRunTests(SimpleTestCase):
    def test_symbol_audit(self):
        result = run_audit(make_config(J_audit=2), "bracket(xi)^2", LITERAL, points=16)
        self.assertEqual(result.symbol, "bracket(xi)^2")
        self.assertEqual(result.threshold, 3)
        self.assertTrue(all(report.finite for report in result.reports.values()))

    def test_missing_symbol(self):
        with self.assertRaises(DomainError):
            multiplier_from(make_config(experiment__kind="symbol"))


class RunNormTests(SimpleTestCase):
    def test_dyadic_norm_uses_family(self):
        result, fam = run_norm(make_config(s=0.5), BESOV)
        self.assertEqual(result.kind, BESOV)
        self.assertEqual(fam.J, 2)
        self.assertGreater(result.value, 0.0)

    def test_sobolev_kinds_skip_family(self):
        for kind in (SOBOLEV, GEN_SOBOLEV):
            result, fam = run_norm(make_config(s=1.0), kind)
            self.assertIsNone(fam)
            self.assertTrue(math.isfinite(result.value))


class HelperTests(SimpleTestCase):
    def test_streams_are_independent(self):
        config = make_config(seed=5)
        self.assertNotEqual(rng_from(config, 0).random(), rng_from(config, 1).random())
        np.testing.assert_array_equal(rng_from(config, 1).random(3), rng_from(config, 1).random(3))

    def test_stability_spread(self):
        self.assertTrue(math.isnan(stability_spread([])))
        rows = [{"dims": 32, "constant": 2.0}, {"dims": 64, "constant": 4.0}, {"dims": 128, "constant": math.nan}]
        self.assertEqual(stability_spread(rows), 2.0)
