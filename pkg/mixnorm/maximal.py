"""
Directional and iterated maximal operators over contiguous windows of
samples. Windows are clipped at the grid edges; nothing wraps around.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d

from .exceptions import DomainError, PreconditionError, ShapeError
from .mixed_grid import GridFunction, ExponentVector, as_exponents, dft_forward, mixed_norm
from .spaces import lq_aggregate

logger = logging.getLogger(__name__)

SWEEP = "sweep"
ORACLE = "oracle"

# Relative spectral mass tolerated outside the declared band.
BAND_TOL = 1e-8


@dataclass(frozen=True)
class MaximalParams:
    r: ExponentVector
    b: tuple = None

    def __post_init__(self):
        r = as_exponents(self.r)
        if any(math.isinf(v) for v in r):
            raise DomainError(f"maximal exponents must be finite, got {r.entries}")
        object.__setattr__(self, "r", r)
        if self.b is not None:
            b = tuple(float(v) for v in self.b)
            if len(b) != r.n or any(not math.isfinite(v) or v <= 0 for v in b):
                raise DomainError(f"band limits must be {r.n} positive finite numbers, got {self.b}")
            object.__setattr__(self, "b", b)


def _prefix_sums(data):
    prefix = np.zeros((data.shape[0] + 1,) + data.shape[1:])
    np.cumsum(data, axis=0, out=prefix[1:])
    return prefix


def _window_sweep(data):
    """Max over all windows containing each index of axis 0, by window length."""
    prefix = _prefix_sums(data)
    size = data.shape[0]
    best = np.full(data.shape, -np.inf)
    for width in range(1, size + 1):
        averages = np.full(data.shape, -np.inf)
        averages[: size - width + 1] = (prefix[width:] - prefix[:-width]) / width
        # the window starting at u covers index i iff i - width < u <= i
        best = np.maximum(
            best,
            maximum_filter1d(averages, size=width, axis=0, mode="constant", cval=-np.inf, origin=(width - 1) // 2),
        )
    return best


def _window_oracle(data):
    """Same maximum, enumerated by left endpoint with suffix maxima."""
    prefix = _prefix_sums(data)
    size = data.shape[0]
    best = np.full(data.shape, -np.inf)
    trailing = (1,) * (data.ndim - 1)
    for start in range(size):
        lengths = np.arange(1, size - start + 1).reshape((-1,) + trailing)
        averages = (prefix[start + 1:] - prefix[start]) / lengths
        suffix = np.maximum.accumulate(averages[::-1], axis=0)[::-1]
        best[start:] = np.maximum(best[start:], suffix)
    return best


_KERNELS = {SWEEP: _window_sweep, ORACLE: _window_oracle}


def _along_axis(data, axis, method):
    kernel = _KERNELS[method]
    return np.moveaxis(kernel(np.moveaxis(data, axis, 0)), 0, axis)


def _check_axis(k, n):
    if not 1 <= k <= n:
        raise DomainError(f"axis {k} outside 1..{n}")


def directional_max(f, k, method=SWEEP):
    """M_k |f| along axis k (1-based)."""
    _check_axis(k, f.n)
    if method not in _KERNELS:
        raise DomainError(f"unknown method {method!r}")
    return GridFunction(_along_axis(np.abs(f.values), k - 1, method), f.grid)


def iterated_max(f, prm, method=SWEEP):
    r = as_exponents(prm.r, f.n).entries
    data = np.abs(f.values) ** r[0]
    data = _along_axis(data, 0, method)
    for axis in range(1, f.n):
        data = _along_axis(data ** (r[axis] / r[axis - 1]), axis, method)
    return GridFunction(data ** (1.0 / r[-1]), f.grid)


def fefferman_stein_ratio(fs, p, q, prm):
    if not fs:
        raise DomainError("empty function family")
    grid = fs[0].grid
    if any(f.grid != grid for f in fs):
        raise ShapeError("functions live on different grids")
    p = as_exponents(p, grid.n)
    r = as_exponents(prm.r, grid.n).entries
    for k in range(grid.n):
        bound = min(min(p.entries[: k + 1]), q)
        if not r[k] < bound:
            raise PreconditionError(f"r_{k + 1}={r[k]} must be below min(p_1..p_{k + 1}, q)={bound}", index=k + 1)
    logger.debug("fefferman-stein over %d functions with r=%s", len(fs), r)
    maximal = np.stack([iterated_max(f, prm).values.real for f in fs])
    plain = np.stack([np.abs(f.values) for f in fs])
    denominator = mixed_norm(GridFunction(lq_aggregate(plain, q), grid), p)
    if denominator == 0:
        raise DomainError("Fefferman-Stein ratio of the zero family is undefined")
    return mixed_norm(GridFunction(lq_aggregate(maximal, q), grid), p) / denominator


def _check_band(f, b):
    spectrum = dft_forward(f)
    magnitude = np.abs(spectrum.values)
    outside = np.zeros(spectrum.dims, dtype=bool)
    for axis, (coords, limit) in enumerate(zip(spectrum.grid.axes(), b)):
        shape = [1] * f.n
        shape[axis] = coords.size
        outside |= (np.abs(coords) > limit).reshape(shape)
    peak = magnitude.max()
    if peak > 0 and np.any(outside) and magnitude[outside].max() > BAND_TOL * peak:
        raise PreconditionError(f"spectrum extends beyond the band {b}")


def peetre_maximal(f, prm):
    """sup_z |f(x - z)| / prod (1 + |b_k z_k|)^{1/r_k}, one axis at a time."""
    if prm.b is None:
        raise DomainError("peetre_maximal needs band limits")
    r = as_exponents(prm.r, f.n).entries
    data = np.abs(f.values)
    for axis, (coords, limit) in enumerate(zip(f.grid.axes(), prm.b)):
        moved = np.moveaxis(data, axis, 0)
        result = np.empty_like(moved)
        trailing = (1,) * (moved.ndim - 1)
        for i, x in enumerate(coords):
            weight = (1.0 + np.abs(limit * (x - coords))) ** (1.0 / r[axis])
            result[i] = np.max(moved / weight.reshape((-1,) + trailing), axis=0)
        data = np.moveaxis(result, 0, axis)
    return GridFunction(data, f.grid)


def peetre_ratio(f, prm):
    if prm.b is None:
        raise DomainError("peetre_ratio needs band limits")
    _check_band(f, prm.b)
    peetre = peetre_maximal(f, prm).values.real
    maximal = iterated_max(f, prm).values.real
    positive = maximal > 0
    if not np.any(positive):
        raise DomainError("Peetre ratio of the zero function is undefined")
    return float(np.max(peetre[positive] / maximal[positive]))
