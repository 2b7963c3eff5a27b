"""
Desk-scale property checks. Each check draws from its own seeded
generator and returns a CheckResult; run_suite runs a selection.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .anisotropy import AnisotropyVector, aniso_dilate, aniso_norm, bracket, euclid_comparison
from .ensembles import CENTRE_FRACTION, bump_ensemble
from .exceptions import DomainError, MixnormError
from .experiments import anisotropy_from, grid_from, rng_from
from .littlewood_paley import Profile, build_family, partition_residual, support_overlap
from .maximal import ORACLE, SWEEP, MaximalParams, directional_max, fefferman_stein_ratio, iterated_max, peetre_ratio
from .mixed_grid import (
    FREQUENCY,
    ExponentVector,
    Grid,
    GridFunction,
    admissible,
    dft_inverse,
    hausdorff_young_check,
    holder_check,
    rect_shell,
    shell_norm_chain,
)
from .multipliers import apply_multiplier, lifting_multiplier, smoothness_threshold

logger = logging.getLogger(__name__)

SCALING_TOL = 1e-9
HOLDER_SLACK = 1e-12
HY_ALLOWANCE = 1.01
PARTITION_TOL = 1e-12
CHAIN_SLACK = 1e-9
ITERATED_TOL = 1e-12
ROUNDTRIP_TOL = 1e-8
PEETRE_SPREAD = 10.0
FS_GROWTH = 0.01
FS_HOMOGENEITY_TOL = 1e-12

HOLDER_PAIRS = 200
HOLDER_EXPONENTS = ((1.0, 2.0), (3.0, 1.5), (math.inf, 1.0))
HY_EXPONENTS = ((2.0, 2.0), (2.0, 1.5), (2.0, 1.0))
CHAIN_FUNCTIONS = 50
CHAIN_PAIRS = 3
PARTITION_LEVELS = (3, 4, 5, 6)
# (dimension, per-axis sample cap)
PARTITION_SHAPES = ((1, 2 ** 16), (2, 512))
PARTITION_ANISOTROPIES = {1: ((1.0,), (2.0,)), 2: ((1.0, 1.0), (1.0, 2.0))}
PEETRE_BANDS = (1.0, 2.0, 4.0, 8.0)
FS_SIZES = (5, 10, 20, 40)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


def check_scaling(config, rng):
    samples = config["checks"]["samples"]
    worst = 0.0
    for n in (1, 2, 3):
        a = AnisotropyVector(tuple(rng.uniform(1.0, 3.0, size=n)))
        x = rng.normal(scale=3.0, size=(samples, n))
        lam = 2.0 ** rng.uniform(-3.0, 3.0, size=samples)
        dilated = x * lam[:, None] ** a.as_array()
        lhs = aniso_norm(dilated, a)
        rhs = lam * aniso_norm(x, a)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / rhs)))
    return CheckResult("scaling", worst <= SCALING_TOL, {"max_relative_error": worst})


def check_euclidean(config, rng):
    samples = config["checks"]["samples"]
    a = anisotropy_from(config)
    x = rng.normal(scale=3.0, size=(samples, a.n))
    iso = AnisotropyVector.isotropic(a.n)
    euclid = np.linalg.norm(x, axis=-1)
    error = float(np.max(np.abs(aniso_norm(x, iso) - euclid) / euclid))
    comparison = euclid_comparison(a, x)
    passed = error <= SCALING_TOL and 0 < comparison.c1 <= 1.0 <= comparison.c2 < math.inf
    return CheckResult("euclidean", passed, {"max_relative_error": error, "c1": comparison.c1, "c2": comparison.c2})


def check_symmetry(config, rng):
    a = anisotropy_from(config)
    x = rng.normal(scale=5.0, size=(config["checks"]["samples"], a.n))
    mirrored = bool(np.array_equal(aniso_norm(x, a), aniso_norm(-x, a)))
    brackets = bracket(x, a)
    growing = bracket(aniso_dilate(2.0, a, x), a) >= brackets
    passed = mirrored and bool(np.all(brackets >= 1.0)) and bool(np.all(growing))
    return CheckResult("symmetry", passed, {"even": mirrored, "min_bracket": float(brackets.min())})


def _random_function(rng, grid):
    return GridFunction(rng.normal(size=grid.dims) + 1j * rng.normal(size=grid.dims), grid)


def _gaussian(rng, grid):
    x = grid.mesh()
    width = rng.uniform(0.5, 1.5, size=grid.n)
    return GridFunction(np.exp(-0.5 * np.sum((x / width) ** 2, axis=-1)), grid)


def _plane(config):
    """The configured grid when it is two-dimensional, else a small square one."""
    grid = grid_from(config)
    return grid if grid.n == 2 else Grid((32, 32), (4.0, 4.0))


def check_holder(config, rng):
    grid = _plane(config)
    candidates = list(HOLDER_EXPONENTS)
    if len(config["p"]) == 2 and min(config["p"]) >= 1:
        candidates.insert(0, tuple(config["p"]))
    worst = 0.0
    degenerate = 0
    for i in range(HOLDER_PAIRS):
        p = candidates[i % len(candidates)]
        result = holder_check(_random_function(rng, grid), _random_function(rng, grid), p)
        degenerate += int(result.degenerate)
        worst = max(worst, result.ratio)
    passed = worst <= 1.0 + HOLDER_SLACK and not degenerate
    return CheckResult("holder", passed, {"pairs": HOLDER_PAIRS, "max_ratio": worst})


def check_hausdorff_young(config, rng):
    grid = grid_from(config)
    t = tuple(config["t"] or (2.0,) * grid.n)
    ok, _ = admissible(t)
    if not ok:
        return CheckResult("hausdorff_young", False, {"error": f"t={list(t)} is not admissible"})
    cases = [(grid, t)] + [(_plane(config), exponents) for exponents in HY_EXPONENTS]
    worst = {}
    for g, exponents in cases:
        for f in (_gaussian(rng, g), _random_function(rng, g)):
            key = ",".join(f"{v:g}" for v in exponents)
            worst[key] = max(worst.get(key, 0.0), hausdorff_young_check(f, exponents).normalized)
    return CheckResult("hausdorff_young", max(worst.values()) <= HY_ALLOWANCE, {"normalized": worst})


def _resolving_grid(a, J, cap):
    """Frequency grid whose extents clear level J on every axis."""
    extent = [2.0 ** (J * ak + 1.5) for ak in a.a]
    dims = [min(2 ** (math.ceil(J * ak + 1.5) + 3), cap) for ak in a.a]
    return Grid(tuple(dims), tuple(extent), FREQUENCY)


def check_partition(config, rng):
    a = anisotropy_from(config)
    fam = build_family(a, grid_from(config), J=config["J"])
    families = [fam]
    for n, cap in PARTITION_SHAPES:
        for a_k in PARTITION_ANISOTROPIES[n]:
            for J in PARTITION_LEVELS:
                family_a = AnisotropyVector(a_k)
                families.append(build_family(family_a, _resolving_grid(family_a, J, cap), J=J))
    worst, excess = 0.0, 0
    for family in families:
        worst = max(worst, partition_residual(family))
        excess = max(excess, support_overlap(family) - family.M)
    detail = {"families": len(families), "residual": worst, "overlap_excess": excess, "J": fam.J, "M": fam.M}
    return CheckResult("partition", worst <= PARTITION_TOL and excess <= 0, detail)


def _covered_levels(grid, a):
    levels = []
    for j in range(5):
        box = rect_shell(j, a).bounding_box()
        if all(hi <= L for (_, hi), L in zip(box, grid.extent)):
            levels.append(j)
    return levels


def check_chain(config, rng):
    a = anisotropy_from(config)
    grid = grid_from(config)
    t = ExponentVector(tuple(config["t"] or (2.0,) * a.n))
    r = ExponentVector(tuple(config["r"] or (2.0,) * a.n))
    for name, exponents in (("t", t), ("r", r)):
        ok, _ = admissible(exponents)
        if not ok:
            return CheckResult("chain", False, {"error": f"{name}={list(exponents.entries)} is not admissible"})
    if not t.dominated_by(r):
        return CheckResult("chain", False, {"error": f"t={list(t.entries)} is not below r={list(r.entries)}"})
    pairs = [(t, r)] + [_admissible_pair(rng, a.n) for _ in range(CHAIN_PAIRS)]
    J = build_family(a, grid, J=config["J"]).J
    worst = 0.0
    levels = _covered_levels(grid, a)
    for f in bump_ensemble(grid, a, J, CHAIN_FUNCTIONS, rng):
        for j in levels:
            for lower_exponents, upper_exponents in pairs:
                chain = shell_norm_chain(f, j, a, lower_exponents, upper_exponents)
                for lower, upper in zip(chain, chain[1:]):
                    worst = max(worst, (lower - upper) / max(upper, 1e-300))
    detail = {
        "levels": levels,
        "pairs": [[list(lo.entries), list(hi.entries)] for lo, hi in pairs],
        "max_violation": worst,
    }
    return CheckResult("chain", worst <= CHAIN_SLACK, detail)


def _admissible_pair(rng, n):
    """Random t <= r, both non-increasing with entries in [1, 2]."""
    r = np.sort(rng.uniform(1.0, 2.0, size=n))[::-1]
    t = np.sort(rng.uniform(1.0, r))[::-1]
    return ExponentVector(tuple(float(v) for v in t)), ExponentVector(tuple(float(v) for v in r))


def check_maximal_oracle(config, rng):
    checks = config["checks"]
    mismatches = 0
    for _ in range(checks["fibers"]):
        size = 2 * int(rng.integers(1, checks["fiber_length"] // 2 + 1))
        grid = Grid((size,), (1.0,))
        f = GridFunction(rng.exponential(size=size), grid)
        fast = directional_max(f, 1, SWEEP).values
        slow = directional_max(f, 1, ORACLE).values
        mismatches += int(not np.array_equal(fast, slow))
    return CheckResult("maximal_oracle", mismatches == 0, {"fibers": checks["fibers"], "mismatches": mismatches})


def check_iterated_oracle(config, rng):
    n = len(config["a"])
    grid = Grid((32,) * n, (1.0,) * n)
    f = _random_function(rng, grid)
    prm = MaximalParams(ExponentVector(tuple(rng.uniform(0.5, 2.0, size=n))))
    fast = iterated_max(f, prm, SWEEP).values.real
    slow = iterated_max(f, prm, ORACLE).values.real
    error = float(np.max(np.abs(fast - slow) / slow))
    dominates = bool(np.all(fast >= np.abs(f.values) * (1 - ITERATED_TOL)))
    return CheckResult("iterated_oracle", error <= ITERATED_TOL and dominates, {"max_relative_error": error})


def _band_limited(grid, b):
    """Smooth even spectrum vanishing outside [-b, b]."""
    xi = grid.dual().axes()[0]
    return dft_inverse(GridFunction(Profile().theta_1d(2.0 * xi / b), grid.dual()))


def check_peetre(config, rng):
    grid = Grid((1024,), (32.0,))
    r = float(rng.uniform(0.5, 1.5))
    ratios = [peetre_ratio(_band_limited(grid, b), MaximalParams((r,), b=(b,))) for b in PEETRE_BANDS]
    spread = max(ratios) / min(ratios)
    return CheckResult("peetre", spread < PEETRE_SPREAD, {"r": r, "ratios": ratios, "spread": spread})


def _shifted_bumps(rng, grid, count, width):
    x = grid.mesh()
    half = np.asarray(grid.extent)
    bumps = []
    for _ in range(count):
        centre = rng.uniform(-CENTRE_FRACTION, CENTRE_FRACTION, size=grid.n) * half
        bumps.append(GridFunction(np.exp(-0.5 * np.sum(((x - centre) / width) ** 2, axis=-1)), grid))
    return bumps


def check_fefferman_stein(config, rng):
    """Nested families never beat their best single member; the ratio ignores scalar factors."""
    n = len(config["a"])
    grid = Grid((32,) * n, (4.0,) * n)
    p = ExponentVector.constant(2.0, n)
    prm = MaximalParams(ExponentVector.constant(1.5, n))
    fs = _shifted_bumps(rng, grid, FS_SIZES[-1], 0.5)
    singles = [fefferman_stein_ratio([f], p, 2.0, prm) for f in fs]
    ratios = []
    growth = 0.0
    for size in FS_SIZES:
        ratios.append(fefferman_stein_ratio(fs[:size], p, 2.0, prm))
        growth = max(growth, ratios[-1] / max(singles[:size]) - 1.0)
    scaled = fefferman_stein_ratio([f.replace(4.0 * f.values) for f in fs[: FS_SIZES[0]]], p, 2.0, prm)
    drift = abs(scaled - ratios[0]) / ratios[0]
    passed = growth <= FS_GROWTH and drift <= FS_HOMOGENEITY_TOL
    return CheckResult("fefferman_stein", passed, {"sizes": list(FS_SIZES), "ratios": ratios, "growth": growth, "homogeneity_error": drift})


def check_lifting_roundtrip(config, rng):
    a = anisotropy_from(config)
    grid = grid_from(config)
    fam = build_family(a, grid, J=config["J"])
    f = bump_ensemble(grid, a, fam.J, 1, rng)[0]
    scale = float(np.max(np.abs(f.values)))
    worst = 0.0
    for alpha in (-2.0, -1.0, 1.0, 2.0):
        there = apply_multiplier(lifting_multiplier(alpha, a), f)
        back = apply_multiplier(lifting_multiplier(-alpha, a), there)
        worst = max(worst, float(np.max(np.abs(back.values - f.values))) / scale)
    return CheckResult("lifting_roundtrip", worst <= ROUNDTRIP_TOL, {"max_relative_error": worst})


def check_threshold(config, rng):
    mismatches = []
    for _ in range(100):
        n = int(rng.integers(1, 5))
        p = Fraction(int(rng.integers(2, 41)), 4)
        q = Fraction(int(rng.integers(2, 41)), 4)
        expected = math.floor(n / min(p, q) + Fraction(n, 2)) + 1
        got = smoothness_threshold((float(p),) * n, float(q), (2.0,) * n)
        if got != expected:
            mismatches.append({"n": n, "p": float(p), "q": float(q), "expected": expected, "got": got})
    return CheckResult("threshold", not mismatches, {"mismatches": mismatches})


CHECKS = {
    "scaling": check_scaling,
    "euclidean": check_euclidean,
    "symmetry": check_symmetry,
    "holder": check_holder,
    "hausdorff_young": check_hausdorff_young,
    "partition": check_partition,
    "chain": check_chain,
    "maximal_oracle": check_maximal_oracle,
    "iterated_oracle": check_iterated_oracle,
    "peetre": check_peetre,
    "fefferman_stein": check_fefferman_stein,
    "lifting_roundtrip": check_lifting_roundtrip,
    "threshold": check_threshold,
}


def run_suite(config, only=None):
    names = list(CHECKS) if not only else list(only)
    unknown = sorted(set(names) - set(CHECKS))
    if unknown:
        raise DomainError(f"unknown checks: {', '.join(unknown)}")
    results = []
    for stream, name in enumerate(CHECKS):
        if name not in names:
            continue
        try:
            result = CHECKS[name](config, rng_from(config, 100 + stream))
        except MixnormError as exc:
            result = CheckResult(name, False, {"error": str(exc)})
        logger.info("check %s: %s", name, "pass" if result.passed else "FAIL")
        results.append(result)
    return results
