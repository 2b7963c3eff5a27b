from mixnorm.invariants import CHECKS, run_suite
from mixnorm.management.base import Outcome, ReportCommand
from reports.serializers import CheckResultSerializer
from reports.writers import check_rows


class Command(ReportCommand):
    help = "Run the property checks and report pass/fail for each"
    name = "check_invariants"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--only", nargs="+", choices=sorted(CHECKS), help="run only these checks")

    def run(self, config, options):
        results = run_suite(config, options.get("only"))
        failed = [result.name for result in results if not result.passed]
        return Outcome(
            CheckResultSerializer(results, many=True).data,
            passed=not failed,
            rows=check_rows(results),
            failure=f"failed checks: {', '.join(failed)}" if failed else None,
        )
