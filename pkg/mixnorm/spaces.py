import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from django.conf import settings

from .anisotropy import aniso_norm
from .exceptions import DomainError, ShapeError
from .littlewood_paley import lp_block
from .mixed_grid import GridFunction, ExponentVector, as_exponents, dft_forward, dft_inverse, mixed_norm

logger = logging.getLogger(__name__)

BESOV = "besov"
TRIEBEL_LIZORKIN = "triebel_lizorkin"
SOBOLEV = "sobolev"
GEN_SOBOLEV = "gen_sobolev"
KINDS = (BESOV, TRIEBEL_LIZORKIN, SOBOLEV, GEN_SOBOLEV)

# Tolerance when reading s / a_j as an integer.
INTEGRALITY_TOL = 1e-12


@dataclass(frozen=True)
class SpaceParams:
    s: float
    p: ExponentVector
    q: float
    a: object
    kind: str = TRIEBEL_LIZORKIN
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", as_exponents(self.p, self.a.n))
        object.__setattr__(self, "q", float(self.q))
        if self.kind not in KINDS:
            raise DomainError(f"unknown space kind {self.kind!r}")
        if not self.q > 0:
            raise DomainError(f"q must be positive or inf, got {self.q}")
        if self.kind == TRIEBEL_LIZORKIN and any(math.isinf(v) for v in self.p):
            raise DomainError("Triebel-Lizorkin norms need finite p")
        if self.kind in (SOBOLEV, GEN_SOBOLEV):
            _check_sobolev_exponents(self.p)

    def shifted(self, ds):
        return replace(self, s=self.s + ds)


@dataclass(frozen=True)
class NormResult:
    kind: str
    value: float
    tail_indicator: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def flagged(self):
        if self.value == 0:
            return False
        return self.tail_indicator >= settings.MIXNORM["TAIL_THRESHOLD"] * self.value

    def __float__(self):
        return self.value


def _check_sobolev_exponents(p):
    for value in p:
        if not 1 < value < math.inf:
            raise DomainError(f"Sobolev norms need 1 < p_k < inf, got {p.entries}")


def lq_aggregate(stack, q):
    """l^q aggregate over axis 0, max when q is infinite."""
    if math.isinf(q):
        return stack.max(axis=0)
    scale = stack.max(axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    total = np.sum((stack / safe) ** q, axis=0)
    return np.where(scale > 0, safe * total ** (1.0 / q), 0.0)


def _weighted_blocks(f, s, fam):
    return [2.0 ** (s * j) * np.abs(lp_block(f, j, fam).values) for j in range(fam.J + 1)]


def _tail(block_norms):
    return max(block_norms[-2:])


def _params(prm):
    return {"s": prm.s, "p": list(prm.p.entries), "q": prm.q, "a": list(prm.a.a)}


def tl_norm(f, prm, fam):
    if prm.kind != TRIEBEL_LIZORKIN:
        raise DomainError(f"tl_norm called with {prm.kind} parameters")
    blocks = _weighted_blocks(f, prm.s, fam)
    aggregate = lq_aggregate(np.stack(blocks), prm.q)
    value = mixed_norm(GridFunction(aggregate, f.grid), prm.p)
    tail = _tail([mixed_norm(GridFunction(b, f.grid), prm.p) for b in blocks])
    logger.debug("tl norm over %d blocks: value=%.6g top=%.6g", len(blocks), value, tail)
    return NormResult(TRIEBEL_LIZORKIN, value, tail, _params(prm))


def besov_norm(f, prm, fam):
    if prm.kind != BESOV:
        raise DomainError(f"besov_norm called with {prm.kind} parameters")
    norms = np.array([mixed_norm(GridFunction(b, f.grid), prm.p) for b in _weighted_blocks(f, prm.s, fam)])
    value = float(lq_aggregate(norms, prm.q))
    tail = _tail(list(norms))
    logger.debug("besov norm over %d blocks: value=%.6g top=%.6g", norms.size, value, tail)
    return NormResult(BESOV, value, tail, _params(prm))


def _derivative_symbol(coords, order):
    symbol = (1j * coords) ** order
    if order % 2:
        # the Nyquist sample has no symmetric partner
        symbol[0] = 0.0
    return symbol


def sobolev_norm(f, k, p):
    """||f|| + sum over j with k_j > 0 of ||d^{k_j} f / dx_j^{k_j}||."""
    p = as_exponents(p, f.n)
    _check_sobolev_exponents(p)
    if len(k) != f.n or any(int(kj) != kj or kj < 0 for kj in k):
        raise DomainError(f"derivative orders must be {f.n} nonnegative integers, got {k}")
    total = mixed_norm(f, p)
    spectrum = None
    for axis, order in enumerate(k):
        if order == 0:
            continue
        if spectrum is None:
            spectrum = dft_forward(f)
        shape = [1] * f.n
        shape[axis] = f.dims[axis]
        symbol = _derivative_symbol(spectrum.grid.axes()[axis], int(order)).reshape(shape)
        total += mixed_norm(dft_inverse(spectrum.replace(spectrum.values * symbol)), p)
    return NormResult(SOBOLEV, total, params={"k": [int(kj) for kj in k], "p": list(p.entries)})


def bessel_potential(f, s, a):
    """Inverse transform of (1 + |xi|_a^2)^{s/2} f_hat."""
    spectrum = dft_forward(f)
    if spectrum.n != a.n:
        raise ShapeError(f"grid is {spectrum.n}-dimensional, anisotropy is {a.n}-dimensional")
    weight = (1.0 + aniso_norm(spectrum.grid.mesh(), a) ** 2) ** (s / 2.0)
    return dft_inverse(spectrum.replace(spectrum.values * weight))


def gen_sobolev_norm(f, s, p, a):
    p = as_exponents(p, f.n)
    _check_sobolev_exponents(p)
    value = mixed_norm(f, p) if s == 0 else mixed_norm(bessel_potential(f, s, a), p)
    return NormResult(GEN_SOBOLEV, value, params={"s": s, "p": list(p.entries), "a": list(a.a)})


def sobolev_orders(s, a):
    """Orders k_j = s / a_j; each must be a nonnegative integer."""
    orders = []
    for ak in a.a:
        ratio = s / ak
        nearest = round(ratio)
        if nearest < 0 or abs(ratio - nearest) > INTEGRALITY_TOL:
            raise DomainError(f"s/a_j = {ratio} is not a nonnegative integer; W-comparison refused")
        orders.append(int(nearest))
    return tuple(orders)


def quasi_triangle_constant(p, q=math.inf):
    smallest = min(min(as_exponents(p).entries), q)
    return 2.0 ** max(0.0, 1.0 / smallest - 1.0)


def space_norm(f, prm, fam=None):
    """Dispatch on prm.kind."""
    if prm.kind in (TRIEBEL_LIZORKIN, BESOV) and fam is None:
        raise DomainError(f"{prm.kind} norms need a Littlewood-Paley family")
    if prm.kind == TRIEBEL_LIZORKIN:
        return tl_norm(f, prm, fam)
    if prm.kind == BESOV:
        return besov_norm(f, prm, fam)
    if prm.kind == SOBOLEV:
        return sobolev_norm(f, sobolev_orders(prm.s, prm.a), prm.p)
    return gen_sobolev_norm(f, prm.s, prm.p, prm.a)
