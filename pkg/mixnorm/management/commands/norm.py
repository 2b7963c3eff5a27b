import math

from django.core.management.base import CommandError

from mixnorm.exceptions import DomainError
from mixnorm.experiments import anisotropy_from, grid_from, run_norm, space_params_from
from mixnorm.littlewood_paley import build_family, export_family
from mixnorm.management.base import USAGE, Outcome, ReportCommand
from mixnorm.mixed_grid import PHYSICAL, load_grid_function
from mixnorm.spaces import KINDS, SOBOLEV, sobolev_orders
from reports.serializers import NormResultSerializer
from reports.writers import norm_rows


class Command(ReportCommand):
    help = "Compute a Besov, Triebel-Lizorkin or Sobolev norm of a sampled function"
    name = "norm"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--kind", choices=KINDS, help="defaults to the configured kind")
        parser.add_argument("--input", help="grid function to measure (<path>.bin + <path>.desc)")
        parser.add_argument("--export-family", help="directory for the Littlewood-Paley family samples")

    def run(self, config, options):
        kind = options.get("kind") or config["kind"]
        try:
            prm = space_params_from(config, kind=kind)
            if kind == SOBOLEV:
                sobolev_orders(prm.s, prm.a)
        except DomainError as exc:
            raise CommandError(str(exc), returncode=USAGE)

        f = None
        if options.get("input"):
            f = load_grid_function(options["input"])
            if f.space_tag != PHYSICAL:
                raise CommandError(f"{options['input']} holds {f.space_tag} samples", returncode=USAGE)

        result, fam = run_norm(config, kind, f)
        if options.get("export_family"):
            grid = f.grid if f is not None else grid_from(config)
            fam = fam or build_family(anisotropy_from(config), grid, J=config["J"])
            export_family(fam, options["export_family"])

        body = dict(NormResultSerializer(result).data)
        body["J"] = fam.J if fam is not None else None
        passed = math.isfinite(result.value)
        return Outcome(body, passed=passed, rows=norm_rows(result), tags=(kind,), failure=None if passed else "norm is not finite")
