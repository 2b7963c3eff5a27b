from mixnorm.experiments import run_audit
from mixnorm.management.base import Outcome, ReportCommand
from mixnorm.mixed_grid import GEOMETRIES, LITERAL
from reports.serializers import AuditResultSerializer
from reports.writers import audit_rows

DEFAULT_SYMBOL = "1"


class Command(ReportCommand):
    help = "Audit a multiplier symbol against the L^inf, L^2 and L^t shell conditions"
    name = "audit"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("symbol", nargs="?", help="symbol expression in xi1..xin, e.g. 'bracket(xi)^2'")
        parser.add_argument("--geometry", choices=GEOMETRIES, default=LITERAL)
        parser.add_argument("--points", type=int, help="per-axis samples of the reference shell grid")

    def run(self, config, options):
        symbol = options.get("symbol") or config["experiment"]["symbol"] or DEFAULT_SYMBOL
        geometry = options.get("geometry") or LITERAL
        audit = run_audit(config, symbol, geometry, points=options.get("points"))
        infinite = [mode for mode, report in audit.reports.items() if not report.finite]
        return Outcome(
            AuditResultSerializer(audit).data,
            passed=not infinite,
            rows=audit_rows(audit),
            tags=(audit.verdict, f"{geometry}-shells"),
            failure=f"infinite condition constants: {', '.join(infinite)}" if infinite else None,
        )
