"""
Sampled functions on uniform rectangular grids.

Axis k of a grid with extent L_k and N_k samples holds x_k = -L_k + j h_k,
h_k = 2 L_k / N_k. The dual frequency grid has extent N_k pi / (2 L_k),
so both spaces are described by the same (dims, extent) pair.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np
from decouple import Csv, RepositoryEnv
from scipy import fft

from .exceptions import DomainError, ResolutionError, ShapeError, StateError

logger = logging.getLogger(__name__)

PHYSICAL = "physical"
FREQUENCY = "frequency"
SPACE_TAGS = (PHYSICAL, FREQUENCY)

LITERAL = "literal"
CONSTRUCTION = "construction"
GEOMETRIES = (LITERAL, CONSTRUCTION)

# Relative slack used when deciding whether a sample sits on a region boundary.
BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class Grid:
    dims: tuple
    extent: tuple
    space_tag: str = PHYSICAL

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        extent = tuple(float(e) for e in self.extent)
        if not dims or len(dims) != len(extent):
            raise ShapeError(f"dims {dims} and extents {extent} must be nonempty and of equal length")
        for d in dims:
            if d < 2 or d % 2:
                raise DomainError(f"grid dims must be even and >= 2, got {dims}")
        for e in extent:
            if not math.isfinite(e) or e <= 0:
                raise DomainError(f"grid extents must be positive and finite, got {extent}")
        if self.space_tag not in SPACE_TAGS:
            raise DomainError(f"unknown space tag {self.space_tag!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "extent", extent)

    @property
    def n(self):
        return len(self.dims)

    @property
    def spacing(self):
        return tuple(2.0 * L / N for L, N in zip(self.extent, self.dims))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axes(self):
        return [-L + np.arange(N) * h for L, N, h in zip(self.extent, self.dims, self.spacing)]

    def mesh(self):
        """Coordinates of every sample, shape dims + (n,)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def dual(self):
        other = FREQUENCY if self.space_tag == PHYSICAL else PHYSICAL
        extent = tuple(N * math.pi / (2.0 * L) for N, L in zip(self.dims, self.extent))
        return Grid(self.dims, extent, other)


class GridFunction:
    """Immutable complex samples on a Grid."""

    def __init__(self, values, grid):
        data = np.array(values, dtype=np.complex128, copy=True)
        if data.shape != grid.dims:
            raise ShapeError(f"values of shape {data.shape} do not match grid dims {grid.dims}")
        data.setflags(write=False)
        self.values = data
        self.grid = grid

    @classmethod
    def zeros(cls, grid):
        return cls(np.zeros(grid.dims), grid)

    @property
    def dims(self):
        return self.grid.dims

    @property
    def extent(self):
        return self.grid.extent

    @property
    def space_tag(self):
        return self.grid.space_tag

    @property
    def n(self):
        return self.grid.n

    def replace(self, values):
        return GridFunction(values, self.grid)

    def __repr__(self):
        return f"GridFunction(dims={self.dims}, extent={self.extent}, space_tag={self.space_tag!r})"


@dataclass(frozen=True)
class ExponentVector:
    """Integrability exponents in (0, inf]."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(_exponent(v) for v in self.entries)
        if not entries:
            raise DomainError("exponent vector must have at least one entry")
        for value in entries:
            if not value > 0:
                raise DomainError(f"exponents must be positive, got {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def constant(cls, value, n):
        return cls((value,) * n)

    @property
    def n(self):
        return len(self.entries)

    def reciprocals(self):
        return tuple(0.0 if math.isinf(v) else 1.0 / v for v in self.entries)

    def reciprocal_sum(self):
        """Exact sum of 1/t_k; entries are converted to rationals."""
        return sum((Fraction(0) if math.isinf(v) else 1 / Fraction(v) for v in self.entries), Fraction(0))

    def dominated_by(self, other):
        return all(mine <= theirs for mine, theirs in zip(self.entries, other.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _exponent(value):
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "+inf"):
            return math.inf
        value = text
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DomainError(f"cannot read exponent {value!r}")


def as_exponents(p, n=None):
    vector = p if isinstance(p, ExponentVector) else ExponentVector(tuple(p))
    if n is not None and vector.n != n:
        raise ShapeError(f"exponent vector has {vector.n} entries, expected {n}")
    return vector


def conjugate(p):
    p = as_exponents(p)
    result = []
    for value in p.entries:
        if value < 1:
            raise DomainError(f"conjugate exponents need entries >= 1, got {p.entries}")
        if value == 1:
            result.append(math.inf)
        elif math.isinf(value):
            result.append(1.0)
        else:
            result.append(value / (value - 1.0))
    return ExponentVector(tuple(result))


def admissible(t):
    """True iff 1 <= t_n <= ... <= t_1 <= 2, together with the sum of 1/t_k."""
    t = as_exponents(t)
    entries = t.entries
    ok = all(1 <= v <= 2 for v in entries) and all(
        entries[k + 1] <= entries[k] for k in range(len(entries) - 1)
    )
    return ok, t.reciprocal_sum()


@dataclass(frozen=True, eq=False)
class Region:
    """
    A subset of R^n: full, empty, a closed rectangle, a shell (closed outer
    rectangle minus an open inner one) or an explicit boolean mask.
    """

    kind: str
    outer: tuple = None
    inner: tuple = None
    mask: np.ndarray = None

    @classmethod
    def full(cls):
        return cls("full")

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def rectangle(cls, intervals):
        return cls("rectangle", outer=_intervals(intervals))

    @classmethod
    def shell(cls, outer, inner):
        outer, inner = _intervals(outer), _intervals(inner)
        if len(outer) != len(inner):
            raise ShapeError("shell boxes must have the same dimension")
        return cls("shell", outer=outer, inner=inner)

    @classmethod
    def from_mask(cls, mask):
        return cls("mask", mask=np.asarray(mask, dtype=bool))

    def bounding_box(self):
        return self.outer

    def contains(self, points):
        """Membership of points with shape (..., n)."""
        pts = np.asarray(points, dtype=float)
        if self.kind == "full":
            return np.ones(pts.shape[:-1], dtype=bool)
        if self.kind == "empty":
            return np.zeros(pts.shape[:-1], dtype=bool)
        if self.kind == "mask":
            raise ShapeError("mask regions have no pointwise membership")
        if pts.shape[-1] != len(self.outer):
            raise ShapeError(f"region is {len(self.outer)}-dimensional, points have shape {pts.shape}")
        inside = _in_closed(pts, self.outer)
        if self.kind == "shell":
            inside &= ~_in_open(pts, self.inner)
        return inside

    def indicator(self, grid):
        if self.kind == "mask":
            if self.mask.shape != grid.dims:
                raise ShapeError(f"mask of shape {self.mask.shape} does not match grid dims {grid.dims}")
            return self.mask
        if self.kind in ("full", "empty"):
            return self.contains(np.zeros(grid.dims + (grid.n,)))
        return self.contains(grid.mesh())


def _intervals(intervals):
    result = []
    for lo, hi in intervals:
        lo, hi = float(lo), float(hi)
        if not lo <= hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        result.append((lo, hi))
    return tuple(result)


def _slack(lo, hi):
    return BOUNDARY_SLACK * max(abs(lo), abs(hi), 1.0)


def _in_closed(pts, box):
    inside = np.ones(pts.shape[:-1], dtype=bool)
    for k, (lo, hi) in enumerate(box):
        eps = _slack(lo, hi)
        inside &= (pts[..., k] >= lo - eps) & (pts[..., k] <= hi + eps)
    return inside


def _in_open(pts, box):
    inside = np.ones(pts.shape[:-1], dtype=bool)
    for k, (lo, hi) in enumerate(box):
        eps = _slack(lo, hi)
        inside &= (pts[..., k] > lo + eps) & (pts[..., k] < hi - eps)
    return inside


def _axis_norm(data, p, h):
    if math.isinf(p):
        return data.max(axis=0)
    scale = data.max(axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    total = np.sum((data / safe) ** p, axis=0) * h
    return np.where(scale > 0, safe * total ** (1.0 / p), 0.0)


def mixed_norm(f, p, region=None):
    """
    Iterated Riemann-sum norm, innermost axis x_1 first. A region
    restriction multiplies by its indicator before integrating.
    """
    p = as_exponents(p, f.n)
    data = np.abs(f.values)
    if region is not None:
        data = np.where(region.indicator(f.grid), data, 0.0)
    for pk, h in zip(p.entries, f.grid.spacing):
        data = _axis_norm(data, pk, h)
    return float(data)


def _alternate(values):
    # multiply by (-1)^(j_1 + ... + j_n)
    signs = np.ones(values.shape)
    for axis, size in enumerate(values.shape):
        shape = [1] * values.ndim
        shape[axis] = size
        signs = signs * np.where(np.arange(size) % 2, -1.0, 1.0).reshape(shape)
    return values * signs


def _grid_phase(dims):
    # e^{-i N pi / 2} per axis; real because every N is even
    return float(np.prod([(-1.0) ** (N // 2) for N in dims]))


def dft_forward(f):
    """Samples of the integral of f(x) e^{-i x xi} dx on the dual grid."""
    if f.space_tag != PHYSICAL:
        raise StateError("dft_forward expects a physical-space function")
    spectrum = fft.fftn(_alternate(f.values))
    spectrum = _alternate(spectrum) * (_grid_phase(f.dims) * f.grid.cell_volume)
    return GridFunction(spectrum, f.grid.dual())


def dft_inverse(F):
    """Samples of (2 pi)^{-n} times the integral of F(xi) e^{i x xi} d xi."""
    if F.space_tag != FREQUENCY:
        raise StateError("dft_inverse expects a frequency-space function")
    physical = F.grid.dual()
    values = _alternate(fft.ifftn(_alternate(F.values)))
    values = values * (_grid_phase(F.dims) / physical.cell_volume)
    return GridFunction(values, physical)


def fourier_multiply(f, values):
    """Inverse transform of values * f_hat, on the grid of f."""
    spectrum = dft_forward(f)
    symbol = np.asarray(values)
    if symbol.shape != spectrum.dims:
        raise ShapeError(f"multiplier samples of shape {symbol.shape} do not match grid dims {spectrum.dims}")
    return dft_inverse(spectrum.replace(spectrum.values * symbol))


def _same_grid(f, g):
    if f.grid != g.grid:
        raise ShapeError("functions live on different grids")


@dataclass(frozen=True)
class HolderResult:
    ratio: float
    degenerate: bool = False


def holder_check(f, g, p):
    _same_grid(f, g)
    p = as_exponents(p, f.n)
    denominator = mixed_norm(f, p) * mixed_norm(g, conjugate(p))
    if denominator == 0:
        return HolderResult(0.0, degenerate=True)
    pairing = abs(np.sum(f.values * np.conj(g.values)) * f.grid.cell_volume)
    return HolderResult(float(pairing / denominator))


@dataclass(frozen=True)
class HausdorffYoungResult:
    raw: float
    normalized: float


def hausdorff_young_check(f, t):
    t = as_exponents(t, f.n)
    ok, _ = admissible(t)
    if not ok:
        raise DomainError(f"exponents {t.entries} are not admissible: need 1 <= t_n <= ... <= t_1 <= 2")
    denominator = mixed_norm(f, t)
    if denominator == 0:
        raise DomainError("Hausdorff-Young ratio of the zero function is undefined")
    dual = conjugate(t)
    raw = mixed_norm(dft_forward(f), dual) / denominator
    constant = float(np.prod([(2.0 * math.pi) ** r for r in dual.reciprocals()]))
    return HausdorffYoungResult(raw=raw, normalized=raw / constant)


def shell_region(j, a, geometry=LITERAL):
    """
    Dyadic shell at level j. The literal geometry is R_0 = 2^a[-2,2]^n and
    R_j = 2^{ja}([-2,2]^n minus (-1/2,1/2)^n); the construction geometry
    matches the telescoping family: [-2,2]^n at j = 0 and
    2^{ja}([-2,2]^n minus the open box of half-widths 2^{-a_k}).
    """
    if geometry not in GEOMETRIES:
        raise DomainError(f"unknown shell geometry {geometry!r}")
    if j < 0:
        return Region.empty()
    if j == 0:
        scale = 1.0 if geometry == LITERAL else 0.0
        return Region.rectangle([(-2.0 * 2 ** (scale * ak), 2.0 * 2 ** (scale * ak)) for ak in a.a])
    outer = [(-2.0 * 2 ** (j * ak), 2.0 * 2 ** (j * ak)) for ak in a.a]
    if geometry == LITERAL:
        inner = [(-0.5 * 2 ** (j * ak), 0.5 * 2 ** (j * ak)) for ak in a.a]
    else:
        inner = [(-(2 ** ((j - 1) * ak)), 2 ** ((j - 1) * ak)) for ak in a.a]
    return Region.shell(outer, inner)


def rect_shell(j, a):
    return shell_region(j, a, LITERAL)


def shell_cubes(j, a):
    """The 8^n - 2^n dilated closed cubes of side 1/2 tiling R_j, j >= 1."""
    if j < 1:
        raise DomainError(f"shell_cubes needs j >= 1, got {j}")
    cells = [(-2.0 + i / 2.0, -1.5 + i / 2.0) for i in range(8)]
    cubes = []
    for choice in product(range(8), repeat=a.n):
        if all(i in (3, 4) for i in choice):
            continue
        cubes.append(
            Region.rectangle(
                [(cells[i][0] * 2 ** (j * ak), cells[i][1] * 2 ** (j * ak)) for i, ak in zip(choice, a.a)]
            )
        )
    return cubes


def _box_measure(grid, box):
    # discrete length of each closed interval on the grid
    lengths = []
    for coords, h, (lo, hi) in zip(grid.axes(), grid.spacing, box):
        eps = _slack(lo, hi)
        count = int(np.count_nonzero((coords >= lo - eps) & (coords <= hi + eps)))
        lengths.append(count * h)
    return lengths


def normalized_region_norm(f, p, region):
    """Region norm divided by the norm of 1 over the region's discrete bounding box."""
    p = as_exponents(p, f.n)
    box = region.bounding_box()
    if box is None:
        raise DomainError(f"{region.kind} regions have no bounding box")
    for coords, (lo, hi) in zip(f.grid.axes(), box):
        if lo < coords[0] or hi > coords[-1] + (coords[1] - coords[0]):
            raise ResolutionError(
                f"grid does not cover the box [{lo}, {hi}]",
                required=[max(abs(l), abs(h)) for l, h in box],
            )
    lengths = _box_measure(f.grid, box)
    scale = float(np.prod([length ** r for length, r in zip(lengths, p.reciprocals())]))
    return mixed_norm(f, p, region) / scale


def shell_norm_chain(f, j, a, t, r):
    """Normalized L^1, L^t, L^r and L^2 norms of f over R_j."""
    region = rect_shell(j, a)
    if region.kind == "empty":
        return (0.0, 0.0, 0.0, 0.0)
    ones = ExponentVector.constant(1.0, f.n)
    twos = ExponentVector.constant(2.0, f.n)
    return tuple(normalized_region_norm(f, e, region) for e in (ones, as_exponents(t, f.n), as_exponents(r, f.n), twos))


def _descriptor_lines(grid):
    return [
        "dims = " + ",".join(str(d) for d in grid.dims),
        "extents = " + ",".join(repr(e) for e in grid.extent),
        f"space_tag = {grid.space_tag}",
        "dtype = complex128",
    ]


def save_grid_function(gf, path):
    """Write <path>.bin (little-endian complex128) and <path>.desc."""
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    gf.values.astype("<c16").tofile(base.with_name(base.name + ".bin"))
    base.with_name(base.name + ".desc").write_text("\n".join(_descriptor_lines(gf.grid)) + "\n")
    logger.debug("saved %r to %s", gf, base)


def load_grid_function(path):
    base = Path(path)
    desc = base.with_name(base.name + ".desc")
    if not desc.exists():
        raise ShapeError(f"missing descriptor {desc}")
    data = RepositoryEnv(str(desc)).data
    try:
        dims = tuple(Csv(cast=int)(data["dims"]))
        extents = tuple(Csv(cast=float)(data["extents"]))
        tag = data["space_tag"]
    except KeyError as exc:
        raise ShapeError(f"descriptor {desc} lacks {exc.args[0]!r}")
    except ValueError as exc:
        raise ShapeError(f"descriptor {desc} is corrupted: {exc}")
    grid = Grid(dims, extents, tag)
    raw = np.fromfile(base.with_name(base.name + ".bin"), dtype="<c16")
    if raw.size != int(np.prod(dims)):
        raise ShapeError(f"{raw.size} samples stored, descriptor expects {int(np.prod(dims))}")
    return GridFunction(raw.reshape(dims), grid)
