"""
Anisotropic geometry: dilations, the quasi-homogeneous norm |x|_a, the
anisotropic bracket and empirical Euclidean comparison constants.

Points are arrays whose last axis has length n; every operation is
vectorized over the leading axes.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.special import logsumexp, softmax

from .exceptions import DomainError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
MAX_BISECTION_STEPS = 200


@dataclass(frozen=True)
class AnisotropyVector:
    """The vector a with entries >= 1; a_m, a_M and nu are derived."""

    a: tuple

    def __post_init__(self):
        entries = tuple(float(v) for v in self.a)
        if not entries:
            raise DomainError("anisotropy vector must have at least one entry")
        for k, value in enumerate(entries, start=1):
            if not math.isfinite(value) or value < 1:
                raise DomainError(f"anisotropy entry a_{k}={value} must be finite and >= 1")
        object.__setattr__(self, "a", entries)

    @classmethod
    def isotropic(cls, n):
        return cls((1.0,) * n)

    @property
    def n(self):
        return len(self.a)

    @property
    def a_m(self):
        return min(self.a)

    @property
    def a_M(self):
        return max(self.a)

    @property
    def nu(self):
        """Homogeneous dimension."""
        return sum(self.a)

    def as_array(self):
        return np.asarray(self.a, dtype=float)

    def lifted(self):
        """The anisotropy (1, a_1, ..., a_n) used by the bracket."""
        return AnisotropyVector((1.0,) + self.a)

    def dot(self, gamma):
        return sum(ak * gk for ak, gk in zip(self.a, gamma))


def _points(x, a):
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0 or pts.shape[-1] != a.n:
        raise DomainError(f"points must have last axis of length {a.n}, got shape {pts.shape}")
    return pts


def aniso_dilate(lam, a, x):
    """Return lam^a x = (lam^{a_1} x_1, ..., lam^{a_n} x_n)."""
    if not lam > 0:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    pts = _points(x, a)
    return pts * np.power(float(lam), a.as_array())


def _log_excess(logs, weights, mu):
    # log |e^{-mu a} x|^2, strictly decreasing in mu for x != 0
    return logsumexp(2.0 * (logs - weights * mu[..., None]), axis=-1)


def aniso_norm(x, a, tol=None):
    """
    Quasi-homogeneous norm: the unique lam0 > 0 with |lam0^{-a} x| = 1,
    and 0 at the origin.

    Bisection runs on log(lam) so large coordinates never overflow; the
    bracket starts at [seed/2, 2 seed] with seed = max_k |x_k|^{1/a_k} and
    is widened upward when n is large. One Newton step polishes the root
    so the result depends smoothly on x.
    """
    if tol is None:
        tol = settings.MIXNORM["BISECTION_RTOL"]
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    pts = np.abs(_points(x, a))
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    weights = a.as_array()

    nonzero = np.any(pts > 0, axis=-1)
    with np.errstate(divide="ignore"):
        logs = np.log(pts)
    logs = np.where(nonzero[..., None], logs, 0.0)

    seed = np.max(logs / weights, axis=-1)
    lo = seed - LN2
    hi = seed + LN2
    while True:
        short = _log_excess(logs, weights, hi) > 0
        if not np.any(short):
            break
        hi = np.where(short, hi + LN2, hi)

    steps = 0
    while steps < MAX_BISECTION_STEPS and np.max(hi - lo, initial=0.0) > tol:
        mid = 0.5 * (lo + hi)
        above = _log_excess(logs, weights, mid) > 0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        steps += 1

    mu = 0.5 * (lo + hi)
    terms = 2.0 * (logs - weights * mu[..., None])
    slope = -2.0 * np.sum(weights * softmax(terms, axis=-1), axis=-1)
    mu = mu - logsumexp(terms, axis=-1) / slope
    logger.debug("aniso_norm: %d bisection steps over %d points", steps, mu.size)

    result = np.where(nonzero, np.exp(mu), 0.0)
    return float(result[0]) if single else result


def bracket(x, a, tol=None):
    """Anisotropic bracket <x> = |(1, x)|_{(1, a)}; always >= 1."""
    pts = _points(x, a)
    ones = np.ones(pts.shape[:-1] + (1,))
    return aniso_norm(np.concatenate([ones, pts], axis=-1), a.lifted(), tol=tol)


@dataclass(frozen=True)
class EuclideanComparison:
    c1: float
    c2: float
    samples: int
    empirical: bool = True


def euclid_comparison(a, samples):
    """
    Largest c1 and smallest c2 with
    c1 (1 + |x|_a)^{a_m} <= 1 + |x| <= c2 (1 + |x|_a)^{a_M}
    over the samples. The origin, where both sides equal 1, is always
    included, so c1 <= 1 <= c2.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.size == 0:
        raise DomainError("euclid_comparison needs at least one sample")
    pts = np.atleast_2d(_points(pts, a)).reshape(-1, a.n)
    pts = np.vstack([np.zeros((1, a.n)), pts])
    quasi = aniso_norm(pts, a)
    euclid = np.linalg.norm(pts, axis=-1)
    lower = (1.0 + euclid) / (1.0 + quasi) ** a.a_m
    upper = (1.0 + euclid) / (1.0 + quasi) ** a.a_M
    return EuclideanComparison(c1=float(lower.min()), c2=float(upper.max()), samples=len(pts) - 1)
