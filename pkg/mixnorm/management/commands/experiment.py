import math

from django.core.management.base import CommandError

from mixnorm.exceptions import DomainError
from mixnorm.experiments import experiment_params, plot_rows, run_experiment
from mixnorm.management.base import USAGE, Outcome, ReportCommand
from mixnorm.mixed_grid import GEOMETRIES, LITERAL
from reports.serializers import ExperimentResultSerializer


def _usable(report):
    return report is None or (report.ratios and all(math.isfinite(r) for r in report.ratios))


def _failure(result):
    if not (_usable(result.forward) and _usable(result.inverse)):
        return "ensemble produced no finite ratios"
    if result.flagged_count:
        return f"{result.flagged_count} members flagged: truncated norms carry top-level weight"
    return None


class Command(ReportCommand):
    help = "Run a boundedness experiment over a random band-limited ensemble"
    name = "experiment"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--geometry", choices=GEOMETRIES, default=LITERAL)
        parser.add_argument("--points", type=int, help="per-axis samples of the reference shell grid")

    def run(self, config, options):
        try:
            experiment_params(config)
        except DomainError as exc:
            raise CommandError(str(exc), returncode=USAGE)

        geometry = options.get("geometry") or LITERAL
        result = run_experiment(config, geometry, points=options.get("points"))
        failure = _failure(result)
        tags = [result.forward.verdict, result.kind]
        if result.audit is not None:
            tags.append(f"{geometry}-shells")
        return Outcome(
            ExperimentResultSerializer(result).data,
            passed=failure is None,
            rows=plot_rows(result),
            tags=tags,
            failure=failure,
        )
