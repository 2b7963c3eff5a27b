"""Random test functions: dilated Gaussian bumps whose spectra miss the top two LP levels."""
import logging
from dataclasses import dataclass

import numpy as np

from .anisotropy import aniso_dilate
from .exceptions import DomainError
from .littlewood_paley import Profile, overlap_radius
from .mixed_grid import GridFunction, fourier_multiply

logger = logging.getLogger(__name__)

# Centres stay inside this fraction of each half-width.
CENTRE_FRACTION = 0.4


@dataclass(frozen=True)
class BumpParameters:
    level: int
    centre: tuple
    phase: float
    width: float


def draw_bumps(rng, n, count, scales, width=1.0):
    """Grid-independent parameters, so one seed samples the same functions at every resolution."""
    if count < 1:
        raise DomainError(f"ensemble count must be >= 1, got {count}")
    if not scales:
        raise DomainError("ensemble needs at least one scale")
    bumps = []
    for _ in range(count):
        bumps.append(
            BumpParameters(
                level=int(rng.choice(scales)),
                centre=tuple(rng.uniform(-CENTRE_FRACTION, CENTRE_FRACTION, size=n)),
                phase=float(rng.uniform(0.0, 2.0 * np.pi)),
                width=width,
            )
        )
    return bumps


def band_level(a, J, profile=None):
    """Cutoff level c: supp Theta(2^{-ca} .) lies where phi_{J-1} and phi_J vanish."""
    return J - 2 - overlap_radius(a, profile or Profile())


def default_scales(a, J, profile=None):
    return list(range(max(1, band_level(a, J, profile) + 1)))


def sample_bump(bump, grid, a, J, profile=None):
    profile = profile or Profile()
    x = grid.mesh()
    centre = np.asarray(bump.centre) * np.asarray(grid.extent)
    scaled = aniso_dilate(2.0 ** bump.level, a, x - centre) / bump.width
    values = np.exp(1j * bump.phase - 0.5 * np.sum(scaled ** 2, axis=-1))
    f = GridFunction(values, grid)
    cutoff = profile.theta(aniso_dilate(2.0 ** (-band_level(a, J, profile)), a, grid.dual().mesh()))
    return fourier_multiply(f, cutoff)


def sample_ensemble(bumps, grid, a, J, profile=None):
    return [sample_bump(bump, grid, a, J, profile) for bump in bumps]


def bump_ensemble(grid, a, J, count, rng, scales=None, width=1.0, profile=None):
    if J < 1:
        raise DomainError(f"J must be >= 1, got {J}")
    scales = default_scales(a, J, profile) if scales is None else list(scales)
    bumps = draw_bumps(rng, grid.n, count, scales, width)
    logger.debug("drew %d bumps over scales %s", count, scales)
    return sample_ensemble(bumps, grid, a, J, profile)
