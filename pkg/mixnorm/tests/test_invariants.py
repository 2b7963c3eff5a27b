from django.test import SimpleTestCase

from mixnorm.exceptions import DomainError
from mixnorm.experiments import rng_from
from mixnorm.invariants import (
    CHECKS,
    check_chain,
    check_fefferman_stein,
    check_hausdorff_young,
    check_holder,
    check_partition,
    check_peetre,
    run_suite,
)
from mixnorm.mixed_grid import admissible
from mixnorm.tests.utils import make_config


class RunSuiteTests(SimpleTestCase):
    def test_every_check_passes_on_small_config(self):
        results = run_suite(make_config())
        self.assertEqual([result.name for result in results], list(CHECKS))
        failed = {result.name: result.detail for result in results if not result.passed}
        self.assertEqual(failed, {})

    def test_selection_keeps_suite_order(self):
        results = run_suite(make_config(), only=["threshold", "scaling"])
        self.assertEqual([result.name for result in results], ["scaling", "threshold"])

    def test_seed_reproducibility(self):
        first = run_suite(make_config(seed=3), only=["holder", "chain"])
        second = run_suite(make_config(seed=3), only=["holder", "chain"])
        self.assertEqual([r.detail for r in first], [r.detail for r in second])

    def test_errors_become_failures(self):
        # J beyond what a 32-sample grid resolves
        results = run_suite(make_config(J=9), only=["partition"])
        self.assertFalse(results[0].passed)
        self.assertIn("error", results[0].detail)

    def test_non_admissible_exponents_fail(self):
        results = run_suite(make_config(t=[1.5, 2.0]), only=["hausdorff_young", "chain"])
        self.assertFalse(any(result.passed for result in results))

    def test_chain_needs_t_below_r(self):
        config = make_config(t=[2.0, 2.0], r=[1.5, 1.0])
        result = check_chain(config, rng_from(config))
        self.assertFalse(result.passed)
        self.assertIn("not below", result.detail["error"])

    def test_unknown_check_names(self):
        with self.assertRaises(DomainError):
            run_suite(make_config(), only=["scaling", "parity"])


class CheckScopeTests(SimpleTestCase):
    def run_check(self, check, **overrides):
        config = make_config(**overrides)
        return check(config, rng_from(config, 7))

    def test_holder_covers_every_exponent(self):
        result = self.run_check(check_holder, p=[2, 1.5])
        self.assertTrue(result.passed, result.detail)
        self.assertEqual(result.detail["pairs"], 200)

    def test_hausdorff_young_exponents(self):
        result = self.run_check(check_hausdorff_young)
        self.assertTrue(result.passed, result.detail)
        self.assertEqual(set(result.detail["normalized"]), {"2,2", "2,1.5", "2,1"})
        self.assertAlmostEqual(result.detail["normalized"]["2,2"], 1.0, places=9)

    def test_partition_over_levels_and_dimensions(self):
        result = self.run_check(check_partition)
        self.assertTrue(result.passed, result.detail)
        # the configured family plus J = 3..6 for two anisotropies in one and two dimensions
        self.assertEqual(result.detail["families"], 17)

    def test_chain_pairs_are_admissible(self):
        result = self.run_check(check_chain, t=[2.0, 1.5])
        self.assertTrue(result.passed, result.detail)
        self.assertEqual(len(result.detail["pairs"]), 4)
        for t, r in result.detail["pairs"]:
            self.assertTrue(admissible(t)[0])
            self.assertTrue(admissible(r)[0])
            self.assertTrue(all(lo <= hi for lo, hi in zip(t, r)))

    def test_peetre_is_stable_across_bands(self):
        result = self.run_check(check_peetre)
        self.assertTrue(result.passed, result.detail)
        self.assertEqual(len(result.detail["ratios"]), 4)
        self.assertTrue(all(ratio >= 1.0 - 1e-12 for ratio in result.detail["ratios"]))

    def test_fefferman_stein_does_not_grow(self):
        result = self.run_check(check_fefferman_stein)
        self.assertTrue(result.passed, result.detail)
        self.assertEqual(result.detail["sizes"], [5, 10, 20, 40])
        self.assertLessEqual(result.detail["homogeneity_error"], 1e-12)
