import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from mixnorm.exceptions import MixnormError, ResolutionError, ShapeError, SymbolSyntaxError
from mixnorm.models import ExperimentRun
from reports.config import load_config
from reports.serializers import envelope
from reports.writers import CSV, FORMATS, JSON, render_csv, render_json

logger = logging.getLogger(__name__)

# Exit codes: failed check or experiment, bad configuration or usage.
FAILURE = 1
USAGE = 2

# Errors that mean the input was unusable rather than the run failing.
USAGE_ERRORS = (SymbolSyntaxError, ShapeError, ResolutionError)


def _describe(detail):
    if isinstance(detail, dict):
        return "; ".join(f"{key}: {_describe(value)}" for key, value in detail.items())
    if isinstance(detail, list):
        return ", ".join(_describe(value) for value in detail)
    return str(detail)


class ReportCommand(BaseCommand):
    """
    Shared plumbing: load and validate the config, run, render, write,
    optionally persist, and map failures to exit codes.
    Subclasses implement run(config, options) -> Outcome.
    """

    name = None

    def add_arguments(self, parser):
        parser.add_argument("--config", help="experiment configuration file (key = value)")
        parser.add_argument("--out", help="write the report here instead of stdout")
        parser.add_argument("--format", choices=FORMATS, default=JSON)
        parser.add_argument("--seed", type=int, help="overrides the configured seed")
        parser.add_argument("--save", action="store_true", help="persist the run as an ExperimentRun")

    def handle(self, *args, **options):
        try:
            loaded = load_config(options["config"], seed=options["seed"])
        except serializers.ValidationError as exc:
            raise CommandError(f"invalid configuration: {_describe(exc.detail)}", returncode=USAGE)

        config = loaded.validated_data
        try:
            outcome = self.run(config, options)
        except USAGE_ERRORS as exc:
            raise CommandError(str(exc), returncode=USAGE)
        except OSError as exc:
            raise CommandError(str(exc), returncode=USAGE)
        except MixnormError as exc:
            raise CommandError(str(exc), returncode=FAILURE)

        report = envelope(self.name, loaded.data, outcome.body, outcome.passed)
        rendered = render_csv(outcome.rows) if options["format"] == CSV else render_json(report)
        self.write(rendered, options["out"])
        if options["save"]:
            self.save(config, report, outcome)
        logger.info("%s finished: %s", self.name, "pass" if outcome.passed else "FAIL")
        if not outcome.passed:
            raise CommandError(outcome.failure or f"{self.name} failed", returncode=FAILURE)

    def run(self, config, options):
        raise NotImplementedError

    def write(self, rendered, out):
        if out:
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(rendered)
        else:
            self.stdout.write(rendered.decode(), ending="")

    def save(self, config, report, outcome):
        stored = json.loads(render_json(report))
        run = ExperimentRun.objects.create(
            command=self.name,
            schema=settings.MIXNORM["REPORT_SCHEMA"],
            seed=config["seed"],
            config=stored["config"],
            report=stored["report"],
            passed=outcome.passed,
        )
        run.tags.add(self.name, *outcome.tags)
        logger.info("saved run %d", run.pk)
        return run


class Outcome:
    def __init__(self, body, passed, rows=(), tags=(), failure=None):
        self.body = body
        self.passed = passed
        self.rows = rows
        self.tags = tags
        self.failure = failure
