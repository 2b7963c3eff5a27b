import math
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from mixnorm.anisotropy import AnisotropyVector
from mixnorm.exceptions import DomainError, ShapeError, StateError
from mixnorm.mixed_grid import (
    FREQUENCY,
    ExponentVector,
    Grid,
    GridFunction,
    Region,
    admissible,
    conjugate,
    dft_forward,
    dft_inverse,
    hausdorff_young_check,
    holder_check,
    load_grid_function,
    mixed_norm,
    rect_shell,
    save_grid_function,
    shell_cubes,
    shell_norm_chain,
)

from .utils import gaussian


def random_function(rng, grid):
    return GridFunction(rng.normal(size=grid.dims) + 1j * rng.normal(size=grid.dims), grid)


class GridTests(SimpleTestCase):
    def test_layout(self):
        grid = Grid((8,), (2.0,))
        np.testing.assert_allclose(grid.axes()[0], -2.0 + 0.5 * np.arange(8))
        self.assertEqual(grid.dual().extent, (8 * math.pi / 4.0,))
        self.assertEqual(grid.dual().space_tag, FREQUENCY)
        self.assertEqual(grid.dual().dual(), grid)

    def test_invalid_grids(self):
        with self.assertRaises(DomainError):
            Grid((7,), (1.0,))
        with self.assertRaises(DomainError):
            Grid((8,), (0.0,))
        with self.assertRaises(ShapeError):
            Grid((8, 8), (1.0,))

    def test_values_are_read_only(self):
        f = GridFunction.zeros(Grid((4,), (1.0,)))
        with self.assertRaises(ValueError):
            f.values[0] = 1.0


class MixedNormTests(SimpleTestCase):
    def test_separable_indicator(self):
        grid = Grid((64, 64), (2.0, 2.0))
        x = grid.mesh()
        inside = np.all((x >= 0.0) & (x < 1.0), axis=-1)
        f = GridFunction(inside.astype(float), grid)
        self.assertAlmostEqual(mixed_norm(f, (1.0, 2.0)), 1.0, places=12)

    def test_fubini_factorization(self):
        grid = Grid((32, 48), (3.0, 2.0))
        x = grid.mesh()
        u, v = np.exp(-x[..., 0] ** 2), 1.0 / (1.0 + x[..., 1] ** 2)
        f = GridFunction(u * v, grid)
        line1 = GridFunction(np.exp(-grid.axes()[0] ** 2), Grid((32,), (3.0,)))
        line2 = GridFunction(1.0 / (1.0 + grid.axes()[1] ** 2), Grid((48,), (2.0,)))
        for p in ((1.0, 2.0), (3.0, 1.5), (math.inf, 1.0)):
            expected = mixed_norm(line1, (p[0],)) * mixed_norm(line2, (p[1],))
            self.assertAlmostEqual(mixed_norm(f, p) / expected, 1.0, places=12)

    def test_equal_exponents_match_scalar_norm(self):
        rng = np.random.default_rng(1)
        f = random_function(rng, Grid((16, 16), (1.0, 1.0)))
        scalar = (np.sum(np.abs(f.values) ** 3) * f.grid.cell_volume) ** (1 / 3)
        self.assertAlmostEqual(mixed_norm(f, (3.0, 3.0)) / scalar, 1.0, places=12)

    def test_disjoint_regions_add(self):
        rng = np.random.default_rng(2)
        f = random_function(rng, Grid((16, 16), (1.0, 1.0)))
        left = np.zeros(f.dims, dtype=bool)
        left[:5] = True
        right = np.zeros(f.dims, dtype=bool)
        right[9:] = True
        whole = mixed_norm(f, (2.0, 2.0), Region.from_mask(left | right)) ** 2
        parts = mixed_norm(f, (2.0, 2.0), Region.from_mask(left)) ** 2 + mixed_norm(f, (2.0, 2.0), Region.from_mask(right)) ** 2
        self.assertAlmostEqual(whole / parts, 1.0, places=12)

    def test_full_and_empty_regions(self):
        f = random_function(np.random.default_rng(4), Grid((8, 6), (1.0, 1.0)))
        self.assertEqual(mixed_norm(f, (2.0, 1.5), Region.full()), mixed_norm(f, (2.0, 1.5)))
        self.assertEqual(mixed_norm(f, (2.0, 1.5), Region.empty()), 0.0)

    def test_mask_shape_mismatch(self):
        f = GridFunction.zeros(Grid((4, 4), (1.0, 1.0)))
        with self.assertRaises(ShapeError):
            mixed_norm(f, (2.0, 2.0), Region.from_mask(np.ones((4, 2), dtype=bool)))

    def test_nonpositive_exponent(self):
        with self.assertRaises(DomainError):
            mixed_norm(GridFunction.zeros(Grid((4,), (1.0,))), (0.0,))

    def test_unit_norm_scales_with_level(self):
        t = ExponentVector((1.5,))
        for ak, extent, levels in ((1.0, 32.0, range(1, 5)), (2.0, 256.0, range(1, 4))):
            a = AnisotropyVector((ak,))
            grid = Grid((int(128 * extent),), (extent,))
            one = GridFunction(np.ones(grid.dims), grid)
            base = mixed_norm(one, t, rect_shell(1, a))
            for j in levels:
                ratio = mixed_norm(one, t, rect_shell(j, a)) / base
                self.assertAlmostEqual(ratio / 2.0 ** ((j - 1) * ak / 1.5), 1.0, delta=0.01)


class ExponentTests(SimpleTestCase):
    def test_conjugate_examples(self):
        self.assertEqual(conjugate((2, 2)).entries, (2.0, 2.0))
        self.assertEqual(conjugate((1, 2)).entries, (math.inf, 2.0))
        np.testing.assert_allclose(conjugate((4 / 3, 1.5)).entries, (4.0, 3.0))

    def test_conjugate_is_an_involution(self):
        p = ExponentVector((1.0, 1.25, 2.0, 7.0, "inf"))
        np.testing.assert_allclose(conjugate(conjugate(p)).entries, p.entries)

    def test_conjugate_rejects_small_entries(self):
        with self.assertRaises(DomainError):
            conjugate((0.5, 2.0))

    def test_admissible(self):
        self.assertTrue(admissible((2.0, 1.5))[0])
        self.assertFalse(admissible((1.0, 2.0))[0])
        self.assertFalse(admissible((3.0,))[0])
        self.assertEqual(admissible((2.0, 1.5))[1], Fraction(7, 6))
        self.assertEqual(admissible((2.0, 1.5, 1.0)), (True, Fraction(13, 6)))


class TransformTests(SimpleTestCase):
    def test_gaussian_transform(self):
        grid = Grid((512,), (16.0,))
        spectrum = dft_forward(GridFunction(gaussian(grid), grid))
        xi = spectrum.grid.axes()[0]
        window = np.abs(xi) <= 8.0
        expected = math.sqrt(2 * math.pi) * np.exp(-0.5 * xi**2)
        self.assertLessEqual(np.max(np.abs(spectrum.values[window] - expected[window])), 1e-6)

    def test_roundtrip(self):
        rng = np.random.default_rng(6)
        for dims in ((64,), (32, 16), (256, 256)):
            f = random_function(rng, Grid(dims, (3.0,) * len(dims)))
            back = dft_inverse(dft_forward(f))
            self.assertEqual(back.grid, f.grid)
            self.assertLessEqual(np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values)), 1e-12)

    def test_plancherel(self):
        rng = np.random.default_rng(7)
        f = random_function(rng, Grid((24, 40), (2.0, 5.0)))
        spectrum = dft_forward(f)
        lhs = np.sum(np.abs(f.values) ** 2) * f.grid.cell_volume
        rhs = np.sum(np.abs(spectrum.values) ** 2) * spectrum.grid.cell_volume / (2 * math.pi) ** 2
        self.assertAlmostEqual(lhs / rhs, 1.0, places=10)

    def test_space_checks(self):
        f = GridFunction.zeros(Grid((8,), (1.0,)))
        with self.assertRaises(StateError):
            dft_inverse(f)
        with self.assertRaises(StateError):
            dft_forward(dft_forward(f))


class HolderTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(8)
        self.grid = Grid((16, 16), (2.0, 2.0))

    def test_equality_case(self):
        f = random_function(self.rng, self.grid)
        p = 3.0
        g = f.replace(np.abs(f.values) ** (p - 1) * f.values / np.abs(f.values))
        self.assertAlmostEqual(holder_check(f, g, (p, p)).ratio, 1.0, places=12)

    def test_random_pairs(self):
        for p in ((1.0, 2.0), (3.0, 1.5), (math.inf, 1.0)):
            for _ in range(20):
                result = holder_check(random_function(self.rng, self.grid), random_function(self.rng, self.grid), p)
                self.assertLessEqual(result.ratio, 1.0 + 1e-12)

    def test_zero_is_flagged(self):
        result = holder_check(GridFunction.zeros(self.grid), random_function(self.rng, self.grid), (2.0, 2.0))
        self.assertTrue(result.degenerate)
        self.assertEqual(result.ratio, 0.0)


class HausdorffYoungTests(SimpleTestCase):
    def setUp(self):
        self.grid = Grid((128, 128), (8.0, 8.0))
        self.f = GridFunction(gaussian(self.grid, width=1.2), self.grid)

    def test_plancherel_constant(self):
        result = hausdorff_young_check(self.f, (2.0, 2.0))
        self.assertAlmostEqual(result.raw / (2 * math.pi), 1.0, places=10)
        self.assertAlmostEqual(result.normalized, 1.0, places=10)

    def test_admissible_exponents(self):
        for t in ((2.0, 1.5), (2.0, 1.0)):
            self.assertLessEqual(hausdorff_young_check(self.f, t).normalized, 1.01)

    def test_non_admissible_rejected(self):
        with self.assertRaises(DomainError):
            hausdorff_young_check(self.f, (1.0, 2.0))


class ShellTests(SimpleTestCase):
    def test_rect_shell_examples(self):
        self.assertEqual(rect_shell(-3, AnisotropyVector((1.0,))).kind, "empty")
        shell = rect_shell(1, AnisotropyVector((1.0,)))
        self.assertEqual(shell.outer, ((-4.0, 4.0),))
        self.assertEqual(shell.inner, ((-1.0, 1.0),))
        shell = rect_shell(1, AnisotropyVector((1.0, 2.0)))
        self.assertEqual(shell.outer, ((-4.0, 4.0), (-8.0, 8.0)))
        self.assertEqual(shell.inner, ((-1.0, 1.0), (-2.0, 2.0)))

    def test_cube_counts(self):
        self.assertEqual(len(shell_cubes(1, AnisotropyVector((1.0,)))), 6)
        self.assertEqual(len(shell_cubes(2, AnisotropyVector((1.0, 2.0)))), 60)
        with self.assertRaises(DomainError):
            shell_cubes(0, AnisotropyVector((1.0,)))

    def test_cubes_tile_the_shell(self):
        a = AnisotropyVector((1.0, 2.0))
        grid = Grid((64, 128), (8.0, 16.0))
        union = np.zeros(grid.dims, dtype=bool)
        for cube in shell_cubes(1, a):
            union |= cube.indicator(grid)
        np.testing.assert_array_equal(union, rect_shell(1, a).indicator(grid))

    def test_two_sided_cube_estimate(self):
        rng = np.random.default_rng(9)
        a = AnisotropyVector((1.0, 2.0))
        f = random_function(rng, Grid((64, 128), (8.0, 16.0)))
        p = (1.0, 2.0)
        whole = mixed_norm(f, p, rect_shell(1, a))
        pieces = [mixed_norm(f, p, cube) for cube in shell_cubes(1, a)]
        self.assertLessEqual(max(pieces), whole * (1 + 1e-12))
        self.assertLessEqual(whole, sum(pieces) * (1 + 1e-12))

    def test_chain_is_monotone(self):
        rng = np.random.default_rng(10)
        a = AnisotropyVector((1.0, 1.0))
        grid = Grid((64, 64), (8.0, 8.0))
        for t, r in (((2.0, 1.5), (2.0, 2.0)), ((1.5, 1.0), (2.0, 1.5)), ((1.0, 1.0), (1.2, 1.1))):
            for _ in range(5):
                chain = shell_norm_chain(random_function(rng, grid), 1, a, t, r)
                for lower, upper in zip(chain, chain[1:]):
                    self.assertLessEqual(lower, upper * (1 + 1e-9))


class SerializationTests(SimpleTestCase):
    def test_bit_exact_roundtrip(self):
        rng = np.random.default_rng(11)
        f = random_function(rng, Grid((6, 10), (1.5, 0.1)))
        with tempfile.TemporaryDirectory() as tmp:
            save_grid_function(f, Path(tmp) / "sample")
            loaded = load_grid_function(Path(tmp) / "sample")
        self.assertEqual(loaded.grid, f.grid)
        self.assertEqual(loaded.values.tobytes(), f.values.tobytes())

    def test_corrupted_descriptor(self):
        f = GridFunction.zeros(Grid((4,), (1.0,)))
        with tempfile.TemporaryDirectory() as tmp:
            base = Path(tmp) / "sample"
            save_grid_function(f, base)
            (Path(tmp) / "sample.desc").write_text("dims = four\nextents = 1.0\nspace_tag = physical\n")
            with self.assertRaises(ShapeError):
                load_grid_function(base)
            (Path(tmp) / "sample.desc").write_text("dims = 8\nextents = 1.0\nspace_tag = physical\n")
            with self.assertRaises(ShapeError):
                load_grid_function(base)
