"""
Fourier multipliers: symbols, operator application, the L^inf / L^2 /
L^t shell conditions, smoothness thresholds and the localized profile
used to estimate the kernel of a frequency-localized piece.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np
from django.conf import settings

from .anisotropy import aniso_dilate, aniso_norm, bracket
from .exceptions import DomainError, EvaluationError, PreconditionError, ResolutionError
from .mixed_grid import (
    FREQUENCY,
    GEOMETRIES,
    LITERAL,
    ExponentVector,
    Grid,
    GridFunction,
    Region,
    admissible,
    as_exponents,
    conjugate,
    dft_forward,
    dft_inverse,
    mixed_norm,
)
from .spaces import BESOV, TRIEBEL_LIZORKIN, space_norm
from .symbols import parse

logger = logging.getLogger(__name__)

FINITE_DIFFERENCE = "finite_difference"
ANALYTIC = "analytic"

LINF = "linf"
L2 = "l2"
LMIXED = "lmixed"
MODES = (LINF, L2, LMIXED)

CERTIFIED = "theorem-certified"
EXPLORATORY = "exploratory"

# Central difference stencils as (offset, weight) pairs, second order accurate.
STENCILS = {
    0: ((0, 1.0),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
}

# Margin of the profile frequency grid beyond the window support.
PROFILE_MARGIN = 1.25
# Fraction of each physical axis treated as the decay band.
DECAY_BAND = 0.1


def _require_finite(values, xi):
    bad = ~np.isfinite(values)
    if np.any(bad):
        first = np.argwhere(bad)[0]
        point = np.asarray(xi, dtype=float)[tuple(first)]
        raise EvaluationError(f"symbol is not finite at xi={point.tolist()}", xi=point.tolist())
    return values


@dataclass(frozen=True, eq=False)
class MultiplierSpec:
    symbol: Callable
    n: int
    alpha: float = 0.0
    N: int = 1
    derivative_mode: str = FINITE_DIFFERENCE
    derivative: Callable = None
    step: float = None
    name: str = "m"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"smoothness budget N must be a positive integer, got {self.N}")
        if self.derivative_mode not in (FINITE_DIFFERENCE, ANALYTIC):
            raise DomainError(f"unknown derivative mode {self.derivative_mode!r}")
        if self.derivative_mode == ANALYTIC and self.derivative is None:
            raise DomainError("analytic mode needs a derivative evaluator")
        step = settings.MIXNORM["FD_STEP"] if self.step is None else float(self.step)
        if not step > 0:
            raise DomainError(f"finite-difference step must be positive, got {step}")
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "N", int(self.N))

    def evaluate(self, xi):
        values = np.asarray(self.symbol(xi), dtype=complex)
        values = np.broadcast_to(values, np.shape(xi)[:-1])
        return _require_finite(values, xi)

    def derivatives(self, gammas, xi, h):
        """d^gamma m at xi for each gamma; h is the per-axis difference step."""
        xi = np.asarray(xi, dtype=float)
        if self.derivative_mode == ANALYTIC:
            return {
                gamma: self.evaluate(xi) if not any(gamma) else _require_finite(
                    np.broadcast_to(np.asarray(self.derivative(gamma, xi), dtype=complex), xi.shape[:-1]), xi
                )
                for gamma in gammas
            }
        h = np.asarray(h, dtype=float)
        shifted = {}

        def at(offset):
            if offset not in shifted:
                shifted[offset] = self.evaluate(xi + np.asarray(offset, dtype=float) * h)
            return shifted[offset]

        result = {}
        for gamma in gammas:
            if any(g not in STENCILS for g in gamma):
                raise DomainError(f"finite differences stop at order 3 per axis, got gamma={gamma}")
            total = 0.0
            for combo in product(*(STENCILS[g] for g in gamma)):
                offset = tuple(o for o, _ in combo)
                weight = math.prod(w for _, w in combo)
                total = total + weight * at(offset)
            result[gamma] = total / float(np.prod(h ** np.asarray(gamma)))
        return result


def multi_indices(n, N):
    gammas = [g for g in product(range(N + 1), repeat=n) if sum(g) <= N]
    return sorted(gammas, key=lambda g: (sum(g), g))


def identity_multiplier(n, N=3):
    return MultiplierSpec(
        symbol=lambda xi: np.ones(np.shape(xi)[:-1]),
        n=n,
        N=N,
        derivative_mode=ANALYTIC,
        derivative=lambda gamma, xi: np.zeros(np.shape(xi)[:-1]),
        name="identity",
    )


def modulation_multiplier(v, N=3):
    """e^{-i xi.v}; the operator translates by v."""
    v = np.asarray(v, dtype=float)

    def symbol(xi):
        return np.exp(-1j * (np.asarray(xi) @ v))

    def derivative(gamma, xi):
        return np.prod((-1j * v) ** np.asarray(gamma)) * symbol(xi)

    return MultiplierSpec(symbol=symbol, n=v.size, N=N, derivative_mode=ANALYTIC, derivative=derivative, name="modulation")


def lifting_multiplier(alpha, a, N=3):
    """<xi>^alpha, differentiated by finite differences."""
    return MultiplierSpec(
        symbol=lambda xi: bracket(xi, a) ** alpha,
        n=a.n,
        alpha=alpha,
        N=N,
        name=f"bracket^{alpha:g}",
    )


def rational_multiplier(s, a, N=3):
    return MultiplierSpec(
        symbol=lambda xi: (1.0 + aniso_norm(xi, a) ** 2) ** (s / 2.0),
        n=a.n,
        alpha=s,
        N=N,
        name=f"(1+|xi|_a^2)^{s / 2:g}",
    )


def symbol_multiplier(expression, a, alpha=0.0, N=3):
    parsed = parse(expression, a.n)
    return MultiplierSpec(symbol=lambda xi: parsed(xi, a), n=a.n, alpha=alpha, N=N, name=expression)


def apply_multiplier(m, f):
    spectrum = dft_forward(f)
    values = m.evaluate(spectrum.grid.mesh())
    return dft_inverse(spectrum.replace(spectrum.values * values))


@dataclass(frozen=True)
class LocalizedValue:
    gamma: tuple
    j: int
    value: float
    sup_abs: float = None
    unit_norm: float = None
    sharp_bound: float = None
    chain: tuple = None


@dataclass(frozen=True)
class ConditionReport:
    mode: str
    alpha: float
    N: int
    J_audit: int
    geometry: str
    cells: tuple
    t: tuple = None

    @property
    def constant(self):
        """Supremum over the dyadic shells j >= 1."""
        return max((c.value for c in self.cells if c.j >= 1), default=0.0)

    @property
    def low_constant(self):
        return max((c.value for c in self.cells if c.j == 0), default=0.0)

    @property
    def class_constant(self):
        return max(self.constant, self.low_constant)

    @property
    def finite(self):
        return math.isfinite(self.class_constant)


def reference_shell(j, a, geometry=LITERAL):
    """Shell j written as xi = 2^{c a} eta with eta in a region of [-2, 2]^n; returns (region, c)."""
    if geometry not in GEOMETRIES:
        raise DomainError(f"unknown shell geometry {geometry!r}")
    box = [(-2.0, 2.0)] * a.n
    if j == 0:
        return Region.rectangle(box), (1 if geometry == LITERAL else 0)
    if geometry == LITERAL:
        inner = [(-0.5, 0.5)] * a.n
    else:
        inner = [(-(2.0 ** -ak), 2.0 ** -ak) for ak in a.a]
    return Region.shell(box, inner), j


def _jacobian(c, a, exponents):
    # ||g(2^{-ca} .)||_t = prod 2^{c a_k / t_k} ||g||_t
    return float(np.prod([2.0 ** (c * ak * r) for ak, r in zip(a.a, exponents.reciprocals())]))


def _box_scale(ref, exponents):
    return float(np.prod([(N * h) ** r for N, h, r in zip(ref.dims, ref.spacing, exponents.reciprocals())]))


def _refined_sup(m, gamma, region, ref, eta_best, c, a, h, alpha):
    offsets = product(*([-0.5 * s, 0.0, 0.5 * s] for s in ref.spacing))
    candidates = np.array([eta_best + np.asarray(o) for o in offsets])
    candidates = candidates[region.contains(candidates)]
    xi = aniso_dilate(2.0 ** c, a, candidates)
    values = m.derivatives([gamma], xi, h)[gamma]
    weight = (1.0 + aniso_norm(xi, a)) ** (-alpha + a.dot(gamma))
    return float(np.max(np.abs(weight * values)))


def _audit(m, a, modes, t=None, J_audit=None, geometry=LITERAL, points=None):
    J_audit = settings.MIXNORM["J_AUDIT"] if J_audit is None else int(J_audit)
    if J_audit < 0:
        raise DomainError(f"J_audit must be >= 0, got {J_audit}")
    if m.n != a.n:
        raise DomainError(f"symbol is {m.n}-dimensional, anisotropy is {a.n}-dimensional")
    if t is not None:
        t = as_exponents(t, a.n)
    if LMIXED in modes:
        if t is None:
            raise DomainError("the L^t condition needs exponents t")
        ok, _ = admissible(t)
        if not ok:
            raise DomainError(f"exponents {t.entries} are not admissible")
    points = settings.MIXNORM["AUDIT_POINTS"] if points is None else int(points)
    ref = Grid((points,) * a.n, (2.0,) * a.n, FREQUENCY)
    eta = ref.mesh()
    gammas = multi_indices(a.n, m.N)
    twos = ExponentVector.constant(2.0, a.n)
    ones = ExponentVector.constant(1.0, a.n)
    mixed_targets = {}
    if L2 in modes:
        mixed_targets[L2] = twos
    if LMIXED in modes:
        mixed_targets[LMIXED] = t
    cells = {mode: [] for mode in modes}

    for j in range(J_audit + 1):
        region, c = reference_shell(j, a, geometry)
        mask = region.indicator(ref)
        inside = eta[mask]
        xi = aniso_dilate(2.0 ** c, a, inside)
        h = 2.0 ** (j * a.as_array()) * m.step
        derivatives = m.derivatives(gammas, xi, h)
        logger.debug("audit %s shell j=%d: %d samples, %d multi-indices", m.name, j, xi.shape[0], len(gammas))
        for gamma in gammas:
            magnitude = np.abs(derivatives[gamma])
            if LINF in modes:
                weighted = (1.0 + aniso_norm(xi, a)) ** (-m.alpha + a.dot(gamma)) * magnitude
                best = int(np.argmax(weighted))
                value = max(float(weighted[best]), _refined_sup(m, gamma, region, ref, inside[best], c, a, h, m.alpha))
                cells[LINF].append(LocalizedValue(gamma, j, value))
            if not mixed_targets:
                continue
            samples = np.zeros(ref.dims)
            samples[mask] = magnitude
            sampled = GridFunction(samples, ref)
            indicator = GridFunction(mask.astype(float), ref)
            middle = twos if t is None else t
            chain = tuple(mixed_norm(sampled, e) / _box_scale(ref, e) for e in (ones, middle, twos))
            for mode, exponents in mixed_targets.items():
                jacobian = _jacobian(c, a, exponents)
                weight = 2.0 ** (-j * m.alpha + j * a.dot(gamma) - j * sum(ak * r for ak, r in zip(a.a, exponents.reciprocals())))
                value = weight * jacobian * mixed_norm(sampled, exponents)
                sup_abs = float(magnitude.max(initial=0.0))
                unit_norm = jacobian * mixed_norm(indicator, exponents)
                cells[mode].append(
                    LocalizedValue(gamma, j, value, sup_abs, unit_norm, weight * sup_abs * unit_norm, chain)
                )

    return {
        mode: ConditionReport(
            mode=mode,
            alpha=m.alpha,
            N=m.N,
            J_audit=J_audit,
            geometry=geometry,
            cells=tuple(cells[mode]),
            t=t.entries if mode == LMIXED else (twos.entries if mode == L2 else None),
        )
        for mode in modes
    }


def condition_constant(m, mode, a, J_audit=None, geometry=LITERAL, t=None, points=None):
    if mode not in MODES:
        raise DomainError(f"unknown condition mode {mode!r}")
    return _audit(m, a, (mode,), t=t, J_audit=J_audit, geometry=geometry, points=points)[mode]


def audit_multiplier(m, a, t, J_audit=None, geometry=LITERAL, points=None):
    """All three condition reports from one pass over the shells."""
    return _audit(m, a, MODES, t=t, J_audit=J_audit, geometry=geometry, points=points)


def _rational(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(repr(float(value)))


def _reciprocal(value):
    return Fraction(0) if math.isinf(value) else 1 / _rational(value)


def mu_exponents(p, q, kind=TRIEBEL_LIZORKIN):
    """mu_j = min(p_1..p_j, q) (Besov drops q) and mu = sum of 1/mu_j."""
    if kind not in (BESOV, TRIEBEL_LIZORKIN):
        raise DomainError(f"mu exponents are defined for Besov and Triebel-Lizorkin, got {kind!r}")
    p = as_exponents(p)
    running = math.inf
    mu = []
    for value in p.entries:
        running = min(running, value)
        mu.append(min(running, q) if kind == TRIEBEL_LIZORKIN else running)
    return tuple(mu), sum((_reciprocal(v) for v in mu), Fraction(0))


def smoothness_threshold(p, q, t, kind=TRIEBEL_LIZORKIN):
    """Smallest integer N with N > mu + t."""
    ok, t_sum = admissible(t)
    if not ok:
        raise DomainError(f"exponents {as_exponents(t).entries} are not admissible")
    _, mu_sum = mu_exponents(p, q, kind)
    return math.floor(mu_sum + t_sum) + 1


@dataclass(frozen=True)
class DiagnosticProfile:
    j: int
    eps: Fraction
    budget: Fraction
    N_k: tuple
    r_k: tuple
    m_j: GridFunction
    g_j: GridFunction
    I: float
    I_gamma: dict = field(default_factory=dict)
    hy_bound: dict = field(default_factory=dict)

    @property
    def constant(self):
        """Empirical c in I <= c * sum of I_gamma."""
        total = sum(self.I_gamma.values())
        return self.I / total if total else math.inf


def _decay_band(grid):
    band = np.zeros(grid.dims, dtype=bool)
    for axis, (coords, L) in enumerate(zip(grid.axes(), grid.extent)):
        shape = [1] * grid.n
        shape[axis] = coords.size
        band |= (np.abs(coords) >= (1.0 - DECAY_BAND) * L).reshape(shape)
    return band


def localized_profile(m, j, fam, t, p, q, kind=TRIEBEL_LIZORKIN, eps=None, points=None, decay_tol=1e-5):
    if j < 0:
        raise DomainError(f"level must be >= 0, got {j}")
    a = fam.a
    if m.n != a.n:
        raise DomainError(f"symbol is {m.n}-dimensional, family is {a.n}-dimensional")
    t = as_exponents(t, a.n)
    ok, t_sum = admissible(t)
    if not ok:
        raise DomainError(f"exponents {t.entries} are not admissible")
    mu, mu_sum = mu_exponents(p, q, kind)
    slack = Fraction(m.N) - mu_sum - t_sum
    if slack <= 0:
        raise PreconditionError(f"smoothness budget N={m.N} must exceed mu + t = {mu_sum + t_sum}")
    eps = slack / (2 * a.n) if eps is None else _rational(eps)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    inverse_t = [_reciprocal(v) for v in t.entries]
    inverse_mu = [_reciprocal(v) for v in mu]
    N_k = tuple(im + it + 2 * eps for im, it in zip(inverse_mu, inverse_t))
    r_k = tuple(1 / (im + eps) for im in inverse_mu)

    points = settings.MIXNORM["PROFILE_POINTS"] if points is None else int(points)
    extent = tuple(PROFILE_MARGIN * fam.profile.support * 2.0 ** (fam.M * ak) for ak in a.a)
    freq = Grid((points,) * a.n, extent, FREQUENCY)
    xi = aniso_dilate(2.0 ** j, a, freq.mesh())
    window = sum(fam.evaluate(k, xi) for k in range(max(0, j - fam.M), j + fam.M + 1))
    support = window > 0
    values = np.zeros(freq.dims, dtype=complex)
    values[support] = 2.0 ** (-j * m.alpha) * m.evaluate(xi[support]) * window[support]
    g_j = GridFunction(values, freq)
    scaled = Grid(freq.dims, tuple(e * 2.0 ** (j * ak) for e, ak in zip(extent, a.a)), FREQUENCY)

    kernel = dft_inverse(g_j)
    magnitude = np.abs(kernel.values)
    peak = magnitude.max()
    if peak > 0 and magnitude[_decay_band(kernel.grid)].max() > decay_tol * peak:
        raise ResolutionError(
            f"kernel of the level-{j} profile does not decay inside the grid; raise the sample count",
            required=[2 * points] * a.n,
        )

    x = kernel.grid.mesh()
    weight = np.prod([(1.0 + np.abs(x[..., k])) ** float(1 / r_k[k]) for k in range(a.n)], axis=0)
    I = mixed_norm(kernel.replace(kernel.values * weight), ExponentVector.constant(1.0, a.n))
    dual = conjugate(t)
    hy_factor = (2.0 * math.pi) ** (-float(t_sum))
    I_gamma, hy_bound = {}, {}
    for gamma in multi_indices(a.n, m.N):
        monomial = np.prod([x[..., k] ** g for k, g in enumerate(gamma)], axis=0)
        I_gamma[gamma] = mixed_norm(kernel.replace(monomial * kernel.values), dual)
        derivative = dft_forward(kernel.replace((-1j) ** sum(gamma) * monomial * kernel.values))
        hy_bound[gamma] = hy_factor * mixed_norm(derivative, t)
    logger.debug("profile j=%d: I=%.6g over %d multi-indices", j, I, len(I_gamma))
    return DiagnosticProfile(
        j=j,
        eps=eps,
        budget=mu_sum + t_sum + 2 * a.n * eps,
        N_k=N_k,
        r_k=r_k,
        m_j=GridFunction(values, scaled),
        g_j=g_j,
        I=I,
        I_gamma=I_gamma,
        hy_bound=hy_bound,
    )


def theorem_gate(m, prm, t, report):
    """CERTIFIED only when t is admissible, N clears the threshold and the L^t constant is finite."""
    if t is None or report is None or report.mode != LMIXED:
        return EXPLORATORY
    ok, _ = admissible(t)
    if not ok:
        return EXPLORATORY
    if prm.kind in (BESOV, TRIEBEL_LIZORKIN):
        kind, q = prm.kind, prm.q
    else:
        kind, q = TRIEBEL_LIZORKIN, 2.0
    if m.N < smoothness_threshold(prm.p, q, t, kind):
        return EXPLORATORY
    return CERTIFIED if report.finite else EXPLORATORY


@dataclass(frozen=True)
class MemberRatio:
    index: int
    ratio: float = None
    source: float = None
    target: float = None
    skipped: bool = False
    flagged: bool = False


@dataclass(frozen=True)
class BoundednessReport:
    members: tuple
    verdict: str = EXPLORATORY

    @property
    def ratios(self):
        return [member.ratio for member in self.members if not member.skipped]

    @property
    def sup_ratio(self):
        return max(self.ratios, default=math.nan)

    @property
    def inf_ratio(self):
        return min(self.ratios, default=math.nan)

    @property
    def flagged_count(self):
        return sum(1 for member in self.members if member.flagged)


def boundedness_experiment(m, prm, fam, ensemble, t=None, certificate=None):
    """Ratios ||T_m f|| at order s over ||f|| at order s + alpha."""
    if not ensemble:
        raise DomainError("empty ensemble")
    source_params = prm.shifted(prm.alpha)
    members = []
    for index, f in enumerate(ensemble):
        source = space_norm(f, source_params, fam)
        if source.value == 0:
            logger.warning("member %d has zero source norm; skipped", index)
            members.append(MemberRatio(index, skipped=True, flagged=True))
            continue
        target = space_norm(apply_multiplier(m, f), prm, fam)
        members.append(
            MemberRatio(
                index,
                ratio=target.value / source.value,
                source=source.value,
                target=target.value,
                flagged=source.flagged or target.flagged,
            )
        )
    return BoundednessReport(tuple(members), theorem_gate(m, prm, t, certificate))
