import csv
import io

from rest_framework.renderers import JSONRenderer

from .serializers import plain

JSON = "json"
CSV = "csv"
FORMATS = (JSON, CSV)


def render_json(data):
    return JSONRenderer().render(data, renderer_context={"indent": 2}) + b"\n"


def render_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in rows:
        writer.writerow([plain(value) for value in row])
    return buffer.getvalue().encode()


def check_rows(results):
    yield ("check", "passed")
    for result in results:
        yield (result.name, int(result.passed))


def audit_rows(audit):
    """Localized constants against j, one series per mode and multi-index."""
    yield ("series", "x", "y")
    for mode, report in audit.reports.items():
        for cell in report.cells:
            label = "".join(str(g) for g in cell.gamma)
            yield (f"{mode}_{label}", cell.j, cell.value)


def norm_rows(result):
    yield ("kind", "value", "tail_indicator", "flagged")
    yield (result.kind, result.value, result.tail_indicator, int(result.flagged))
