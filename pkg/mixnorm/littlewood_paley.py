"""
Anisotropic Littlewood-Paley family built by telescoping a smooth plateau:
phi_0 = Theta, phi_j = Theta(2^{-ja} .) - Theta(2^{-(j-1)a} .), so the
levels 0..J sum to Theta(2^{-Ja} .) exactly.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .anisotropy import aniso_dilate
from .exceptions import DomainError, ResolutionError, ShapeError
from .mixed_grid import FREQUENCY, GridFunction, Region, fourier_multiply, save_grid_function

logger = logging.getLogger(__name__)

TRANSITION_FLOOR = 1e-12


def _bump_tail(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > TRANSITION_FLOOR, np.exp(-1.0 / np.maximum(x, TRANSITION_FLOOR)), 0.0)


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    rising = _bump_tail(x)
    falling = _bump_tail(1.0 - np.asarray(x, dtype=float))
    return rising / (rising + falling)


@dataclass(frozen=True)
class Profile:
    """Tensor-product plateau: 1 on [-plateau, plateau]^n, 0 off (-support, support)^n."""

    plateau: float = 1.0
    support: float = 2.0

    def __post_init__(self):
        if not 0 < self.plateau < self.support:
            raise DomainError(f"need 0 < plateau < support, got {self.plateau}, {self.support}")

    @property
    def half_level(self):
        """|u| where the 1-D transition equals 1/2."""
        return 0.5 * (self.plateau + self.support)

    def theta_1d(self, u):
        return smooth_step((self.support - np.abs(u)) / (self.support - self.plateau))

    def theta(self, xi):
        return np.prod(self.theta_1d(xi), axis=-1)


def overlap_radius(a, profile):
    """Smallest M with supp phi_j and supp phi_k disjoint whenever |j - k| > M."""
    return max(1, math.ceil(math.log2(profile.support / profile.plateau) / a.a_m))


@dataclass(frozen=True, eq=False)
class LPFamily:
    a: object
    J: int
    grid: object
    phi_hat: tuple
    profile: Profile = field(default_factory=Profile)
    M: int = 1

    @property
    def lower_bound(self):
        return 0.5

    def theta_at(self, j, xi):
        return self.profile.theta(aniso_dilate(2.0 ** (-j), self.a, xi))

    def evaluate(self, k, xi):
        """phi_k at arbitrary frequencies; zero for k < 0."""
        if k < 0:
            return np.zeros(np.shape(xi)[:-1])
        if k == 0:
            return self.theta_at(0, xi)
        return np.maximum(self.theta_at(k, xi) - self.theta_at(k - 1, xi), 0.0)

    def covered(self):
        """Frequencies where Theta(2^{-Ja} xi) == 1."""
        return self.theta_at(self.J, self.grid.mesh()) == 1.0

    def lower_bound_region(self):
        """Region of the undilated phi_1 on which it is at least one half."""
        outer = [(-self.profile.plateau, self.profile.plateau)] * self.a.n
        inner = [(-self.profile.half_level * 2 ** -ak, self.profile.half_level * 2 ** -ak) for ak in self.a.a]
        return Region.shell(outer, inner)

    def _check_level(self, j):
        if not 0 <= j <= self.J:
            raise DomainError(f"level {j} outside 0..{self.J}")


def resolved_levels(a, grid, profile=None):
    """Largest J whose level-J support fits inside the frequency grid."""
    profile = profile or Profile()
    freq = grid if grid.space_tag == FREQUENCY else grid.dual()
    return min(math.floor(math.log2(xi / profile.support) / ak) for xi, ak in zip(freq.extent, a.a))


def build_family(a, grid, J=None, profile=None, allow_truncation=False):
    profile = profile or Profile()
    freq = grid if grid.space_tag == FREQUENCY else grid.dual()
    if freq.n != a.n:
        raise ShapeError(f"grid is {freq.n}-dimensional, anisotropy is {a.n}-dimensional")
    available = resolved_levels(a, freq, profile)
    if J is None:
        J = available
        if J < 1:
            raise ResolutionError(
                "grid resolves no dyadic level",
                required=[profile.support * 2 ** ak for ak in a.a],
            )
    if J < 1:
        raise DomainError(f"J must be >= 1, got {J}")
    if J > available and not allow_truncation:
        raise ResolutionError(
            f"level {J} is not resolved by frequency extents {freq.extent}",
            required=[profile.support * 2 ** (J * ak) for ak in a.a],
        )

    xi = freq.mesh()
    plateaus = [profile.theta(aniso_dilate(2.0 ** (-j), a, xi)) for j in range(J + 1)]
    phi_hat = [plateaus[0]]
    phi_hat.extend(np.maximum(plateaus[j] - plateaus[j - 1], 0.0) for j in range(1, J + 1))
    for values in phi_hat:
        values.setflags(write=False)
    M = overlap_radius(a, profile)
    logger.debug("built family a=%s J=%d M=%d on %s", a.a, J, M, freq.dims)
    return LPFamily(a=a, J=J, grid=freq, phi_hat=tuple(phi_hat), profile=profile, M=M)


def lp_block(f, j, fam):
    fam._check_level(j)
    if f.grid.dual() != fam.grid:
        raise ShapeError("function and family live on different grids")
    return fourier_multiply(f, fam.phi_hat[j])


def partition_residual(fam):
    covered = fam.covered()
    if not np.any(covered):
        return 0.0
    total = np.sum(fam.phi_hat, axis=0)
    return float(np.max(np.abs(1.0 - total[covered])))


def support_overlap(fam):
    """Largest |j - k| whose sampled supports intersect."""
    supports = [values > 0 for values in fam.phi_hat]
    widest = 0
    for j in range(len(supports)):
        for k in range(j + 1, len(supports)):
            if np.any(supports[j] & supports[k]):
                widest = max(widest, k - j)
    return widest


def export_family(fam, directory):
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    for j, values in enumerate(fam.phi_hat):
        save_grid_function(GridFunction(values, fam.grid), target / f"level_{j:02d}")
        save_grid_function(GridFunction((values > 0).astype(float), fam.grid), target / f"mask_{j:02d}")
    logger.info("exported %d levels to %s", fam.J + 1, target)
    return target
