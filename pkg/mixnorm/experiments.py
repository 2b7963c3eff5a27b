"""
Experiment runners behind the management commands. Each runner takes a
validated configuration mapping (see reports.serializers) and returns
plain result objects; rendering happens in the reports app.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .anisotropy import AnisotropyVector
from .ensembles import default_scales, draw_bumps, sample_ensemble
from .exceptions import DomainError
from .littlewood_paley import build_family
from .mixed_grid import Grid
from .multipliers import (
    LMIXED,
    audit_multiplier,
    boundedness_experiment,
    identity_multiplier,
    lifting_multiplier,
    rational_multiplier,
    smoothness_threshold,
    symbol_multiplier,
    theorem_gate,
)
from .spaces import BESOV, GEN_SOBOLEV, SOBOLEV, TRIEBEL_LIZORKIN, SpaceParams, sobolev_orders, space_norm

logger = logging.getLogger(__name__)

IDENTITY = "identity"
LIFTING = "lifting"
SOBOLEV_RUN = "sobolev"
GEN_SOBOLEV_RUN = "gen_sobolev"
RATIONAL = "rational"
SYMBOL = "symbol"
EXPERIMENT_KINDS = (IDENTITY, LIFTING, SOBOLEV_RUN, GEN_SOBOLEV_RUN, RATIONAL, SYMBOL)


def anisotropy_from(config):
    return AnisotropyVector(tuple(config["a"]))


def grid_from(config, dims=None):
    return Grid(tuple(dims or config["grid"]["dims"]), tuple(config["grid"]["extents"]))


def space_params_from(config, kind=None, s=None):
    return SpaceParams(
        s=config["s"] if s is None else s,
        p=tuple(config["p"]),
        q=config["q"],
        a=anisotropy_from(config),
        kind=kind or config["kind"],
        alpha=config["alpha"],
    )


def rng_from(config, stream=0):
    """Independent generator per stream, all derived from the configured seed."""
    return np.random.default_rng([config["seed"], stream])


def _scales(config, J):
    scales = config["ensemble"].get("scales")
    return list(scales) if scales else default_scales(anisotropy_from(config), J)


def multiplier_from(config, symbol=None):
    a = anisotropy_from(config)
    kind = config["experiment"]["kind"]
    if symbol is not None or kind == SYMBOL:
        expression = symbol if symbol is not None else config["experiment"]["symbol"]
        if not expression:
            raise DomainError("no symbol expression configured")
        return symbol_multiplier(expression, a, alpha=config["alpha"], N=config["N"])
    if kind == IDENTITY:
        return identity_multiplier(a.n, N=config["N"])
    if kind == RATIONAL:
        return rational_multiplier(config["alpha"], a, N=config["N"])
    return lifting_multiplier(config["alpha"], a, N=config["N"])


@dataclass(frozen=True)
class AuditResult:
    reports: dict
    threshold: int
    verdict: str
    symbol: str


def run_audit(config, symbol, geometry, points=None):
    a = anisotropy_from(config)
    m = multiplier_from(config, symbol)
    t = tuple(config["t"] or (2.0,) * a.n)
    reports = audit_multiplier(m, a, t, J_audit=config["J_audit"], geometry=geometry, points=points)
    prm = space_params_from(config)
    kind, q = (prm.kind, prm.q) if prm.kind in (BESOV, TRIEBEL_LIZORKIN) else (TRIEBEL_LIZORKIN, 2.0)
    threshold = smoothness_threshold(prm.p, q, t, kind)
    verdict = theorem_gate(m, prm, t, reports[LMIXED])
    logger.info("audit %s: A_mixed=%.6g threshold=%d verdict=%s", m.name, reports[LMIXED].class_constant, threshold, verdict)
    return AuditResult(reports=reports, threshold=threshold, verdict=verdict, symbol=m.name)


@dataclass(frozen=True)
class ExperimentResult:
    kind: str
    forward: object
    inverse: object = None
    stability: tuple = ()
    audit: AuditResult = None

    @property
    def equivalence_constant(self):
        """Smallest C with every forward ratio in [1/C, C]."""
        ratios = list(self.forward.ratios)
        if self.inverse is not None:
            ratios += list(self.inverse.ratios)
        if not ratios:
            return math.nan
        return max(max(ratios), 1.0 / min(ratios))

    @property
    def flagged_count(self):
        """Members whose norms put too much weight on the top two levels, or had no source norm."""
        return self.forward.flagged_count + (self.inverse.flagged_count if self.inverse is not None else 0)


def _boundedness_run(m, grid, prm, bumps, J, t, certificate):
    a = prm.a
    fam = build_family(a, grid, J=J) if prm.kind in (BESOV, TRIEBEL_LIZORKIN) else None
    ensemble = sample_ensemble(bumps, grid, a, J)
    return boundedness_experiment(m, prm, fam, ensemble, t=t, certificate=certificate)


def experiment_params(config):
    """Space parameters of an experiment; Sobolev runs need integral orders s / a_j and (s + alpha) / a_j."""
    kind = config["experiment"]["kind"]
    if kind == SOBOLEV_RUN:
        a = anisotropy_from(config)
        sobolev_orders(config["s"], a)
        sobolev_orders(config["s"] + config["alpha"], a)
        return space_params_from(config, kind=SOBOLEV)
    if kind == GEN_SOBOLEV_RUN:
        return space_params_from(config, kind=GEN_SOBOLEV)
    return space_params_from(config)


def run_experiment(config, geometry, points=None):
    a = anisotropy_from(config)
    kind = config["experiment"]["kind"]
    grid = grid_from(config)
    prm = experiment_params(config)
    m = multiplier_from(config)
    t = tuple(config["t"] or (2.0,) * a.n)
    audit = run_audit(config, None, geometry, points=points) if kind != IDENTITY else None
    certificate = audit.reports[LMIXED] if audit else None
    # one J for every resolution, so the ensemble is the same continuous family
    grids = [grid] + [grid_from(config, dims=(dims,) * a.n) for dims in config["experiment"]["resolutions"]]
    J = config["J"] or min(build_family(a, g).J for g in grids)
    bumps = draw_bumps(rng_from(config, 1), a.n, config["ensemble"]["count"], _scales(config, J), config["ensemble"]["width"])

    forward = _boundedness_run(m, grid, prm, bumps, J, t, certificate)
    inverse = None
    if kind == LIFTING:
        # T_{-alpha} maps order s back to order s + alpha
        inverse_config = dict(config, alpha=-config["alpha"], s=config["s"] + config["alpha"])
        inverse = _boundedness_run(
            lifting_multiplier(-config["alpha"], a, N=config["N"]), grid,
            space_params_from(inverse_config, kind=prm.kind), bumps, J, t, None,
        )
    stability = tuple(resolution_stability(config, bumps, J)) if config["experiment"]["resolutions"] else ()
    logger.info("experiment %s: sup ratio %.6g over %d members", kind, forward.sup_ratio, len(forward.members))
    return ExperimentResult(kind=kind, forward=forward, inverse=inverse, stability=stability, audit=audit)


def resolution_stability(config, bumps, J):
    """Sup ratio and two-sided constant per grid resolution, same continuous ensemble."""
    a = anisotropy_from(config)
    prm = experiment_params(config)
    m = multiplier_from(config)
    rows = []
    for dims in config["experiment"]["resolutions"]:
        grid = grid_from(config, dims=(dims,) * a.n)
        report = _boundedness_run(m, grid, prm, bumps, J, None, None)
        ratios = report.ratios
        rows.append(
            {
                "dims": dims,
                "sup_ratio": report.sup_ratio,
                "constant": max(max(ratios), 1.0 / min(ratios)) if ratios else math.nan,
            }
        )
    return rows


def stability_spread(rows):
    constants = [row["constant"] for row in rows if math.isfinite(row["constant"])]
    if not constants:
        return math.nan
    return max(constants) / min(constants)


def run_norm(config, kind, f=None):
    a = anisotropy_from(config)
    grid = f.grid if f is not None else grid_from(config)
    prm = space_params_from(config, kind=kind)
    fam = None
    if kind in (BESOV, TRIEBEL_LIZORKIN):
        fam = build_family(a, grid, J=config["J"])
    if f is None:
        J = fam.J if fam is not None else (config["J"] or build_family(a, grid).J)
        bumps = draw_bumps(rng_from(config, 1), a.n, 1, _scales(config, J), config["ensemble"]["width"])
        f = sample_ensemble(bumps, grid, a, J)[0]
    return space_norm(f, prm, fam), fam


def plot_rows(result):
    """CSV rows: ratio against member, then localized constants against j."""
    yield ("series", "x", "y")
    for member in result.forward.members:
        if not member.skipped:
            yield ("ratio", member.index, member.ratio)
    if result.inverse is not None:
        for member in result.inverse.members:
            if not member.skipped:
                yield ("inverse_ratio", member.index, member.ratio)
    for row in result.stability:
        yield ("resolution_constant", row["dims"], row["constant"])
    if result.audit is not None:
        for mode, report in result.audit.reports.items():
            by_level = {}
            for cell in report.cells:
                by_level[cell.j] = max(by_level.get(cell.j, 0.0), cell.value)
            for j, value in sorted(by_level.items()):
                yield (f"{mode}_localized", j, value)
