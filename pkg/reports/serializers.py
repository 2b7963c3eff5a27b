import math
import numbers

import numpy as np
from django.conf import settings
from rest_framework import serializers

from mixnorm.anisotropy import AnisotropyVector
from mixnorm.exceptions import MixnormError
from mixnorm.experiments import EXPERIMENT_KINDS, IDENTITY, stability_spread
from mixnorm.mixed_grid import ExponentVector, Grid
from mixnorm.spaces import KINDS, TRIEBEL_LIZORKIN, SpaceParams


def plain(value):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats spelled out."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return str(value)


class ReportFloatField(serializers.FloatField):
    def to_representation(self, value):
        return plain(value)


class DetailField(serializers.Field):
    def to_representation(self, value):
        return plain(value)


class ScalarExponentField(serializers.Field):
    """A positive number or inf."""

    default_error_messages = {
        "invalid": "A positive number or 'inf' is required.",
    }

    def to_internal_value(self, data):
        try:
            value = float(str(data).strip())
        except ValueError:
            self.fail("invalid")
        if math.isnan(value) or not value > 0:
            self.fail("invalid")
        return value

    def to_representation(self, value):
        return plain(value)


class ExponentField(serializers.Field):
    """Comma list (or sequence) of positive exponents, inf allowed."""

    default_error_messages = {
        "invalid": "Expected positive numbers or 'inf', got {value!r}.",
        "empty": "At least one entry is required.",
    }

    def to_internal_value(self, data):
        items = data.split(",") if isinstance(data, str) else data
        if not isinstance(items, (list, tuple)):
            items = [items]
        if not items:
            self.fail("empty")
        try:
            return ExponentVector(tuple(items)).entries
        except (MixnormError, ValueError, TypeError):
            self.fail("invalid", value=data)

    def to_representation(self, value):
        return plain(list(value))


class GridSerializer(serializers.Serializer):
    dims = serializers.ListField(child=serializers.IntegerField(min_value=2), default=[128])
    extents = serializers.ListField(child=serializers.FloatField(min_value=0.0), default=[8.0])


class EnsembleSerializer(serializers.Serializer):
    count = serializers.IntegerField(min_value=1, default=20)
    scales = serializers.ListField(child=serializers.IntegerField(min_value=0), default=list)
    width = serializers.FloatField(min_value=0.0, default=0.5)

    def validate_width(self, value):
        if value <= 0:
            raise serializers.ValidationError("width must be positive")
        return value


class ExperimentSectionSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=EXPERIMENT_KINDS, default=IDENTITY)
    symbol = serializers.CharField(allow_blank=True, trim_whitespace=True, default="")
    resolutions = serializers.ListField(child=serializers.IntegerField(min_value=2), default=list)


class ChecksSerializer(serializers.Serializer):
    samples = serializers.IntegerField(min_value=1, default=1000)
    fibers = serializers.IntegerField(min_value=1, default=200)
    fiber_length = serializers.IntegerField(min_value=2, default=4096)


def _broadcast(name, values, n):
    values = list(values)
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise serializers.ValidationError({name: f"expected {n} entries, got {len(values)}"})
    return values


class ExperimentConfigSerializer(serializers.Serializer):
    a = ExponentField(default=(1.0, 1.0))
    p = ExponentField(default=(2.0,))
    q = ScalarExponentField(default=2.0)
    s = serializers.FloatField(default=0.0)
    alpha = serializers.FloatField(default=0.0)
    t = ExponentField(default=None, allow_null=True)
    r = ExponentField(default=None, allow_null=True)
    N = serializers.IntegerField(min_value=1, default=3)
    J = serializers.IntegerField(min_value=1, default=None, allow_null=True)
    J_audit = serializers.IntegerField(min_value=0, default=lambda: settings.MIXNORM["J_AUDIT"])
    seed = serializers.IntegerField(min_value=0, max_value=2**64 - 1, default=0)
    kind = serializers.ChoiceField(choices=KINDS, default=TRIEBEL_LIZORKIN)
    grid = GridSerializer()
    ensemble = EnsembleSerializer()
    experiment = ExperimentSectionSerializer()
    checks = ChecksSerializer()

    def validate(self, attrs):
        try:
            a = AnisotropyVector(tuple(attrs["a"]))
        except MixnormError as exc:
            raise serializers.ValidationError({"a": str(exc)})
        n = a.n
        for name in ("p", "t", "r"):
            if attrs.get(name) is not None:
                attrs[name] = tuple(_broadcast(name, attrs[name], n))
        grid = attrs["grid"]
        grid["dims"] = _broadcast("grid.dims", grid["dims"], n)
        grid["extents"] = _broadcast("grid.extents", grid["extents"], n)
        try:
            Grid(tuple(grid["dims"]), tuple(grid["extents"]))
        except MixnormError as exc:
            raise serializers.ValidationError({"grid": str(exc)})
        try:
            SpaceParams(s=attrs["s"], p=attrs["p"], q=attrs["q"], a=a, kind=attrs["kind"], alpha=attrs["alpha"])
        except MixnormError as exc:
            raise serializers.ValidationError({"kind": str(exc)})
        return attrs


# ---------------- REPORTS ----------------
class CheckResultSerializer(serializers.Serializer):
    name = serializers.CharField()
    passed = serializers.BooleanField()
    detail = DetailField()


class LocalizedValueSerializer(serializers.Serializer):
    gamma = serializers.ListField(child=serializers.IntegerField())
    j = serializers.IntegerField()
    value = ReportFloatField()
    sup_abs = ReportFloatField()
    unit_norm = ReportFloatField()
    sharp_bound = ReportFloatField()
    chain = serializers.ListField(child=ReportFloatField())


class ConditionReportSerializer(serializers.Serializer):
    mode = serializers.CharField()
    geometry = serializers.CharField()
    alpha = ReportFloatField()
    N = serializers.IntegerField()
    J_audit = serializers.IntegerField()
    t = ExponentField()
    constant = ReportFloatField()
    low_constant = ReportFloatField()
    class_constant = ReportFloatField()
    finite = serializers.BooleanField()
    cells = LocalizedValueSerializer(many=True)


class AuditResultSerializer(serializers.Serializer):
    symbol = serializers.CharField()
    threshold = serializers.IntegerField()
    verdict = serializers.CharField()
    reports = serializers.SerializerMethodField()

    def get_reports(self, obj):
        return {mode: ConditionReportSerializer(report).data for mode, report in obj.reports.items()}


class MemberRatioSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    ratio = ReportFloatField()
    source = ReportFloatField()
    target = ReportFloatField()
    skipped = serializers.BooleanField()
    flagged = serializers.BooleanField()


class BoundednessReportSerializer(serializers.Serializer):
    verdict = serializers.CharField()
    sup_ratio = ReportFloatField()
    inf_ratio = ReportFloatField()
    flagged_count = serializers.IntegerField()
    members = MemberRatioSerializer(many=True)


class ExperimentResultSerializer(serializers.Serializer):
    kind = serializers.CharField()
    equivalence_constant = ReportFloatField()
    flagged_count = serializers.IntegerField()
    forward = BoundednessReportSerializer()
    inverse = BoundednessReportSerializer(allow_null=True)
    stability = DetailField()
    stability_spread = serializers.SerializerMethodField()
    audit = AuditResultSerializer(allow_null=True)

    def get_stability_spread(self, obj):
        return plain(stability_spread(obj.stability)) if obj.stability else None


class NormResultSerializer(serializers.Serializer):
    kind = serializers.CharField()
    value = ReportFloatField()
    tail_indicator = ReportFloatField()
    flagged = serializers.BooleanField()
    params = DetailField()


def envelope(command, config, body, passed):
    """Top-level report; carries no timestamps so reruns are byte-identical."""
    return {
        "schema": settings.MIXNORM["REPORT_SCHEMA"],
        "command": command,
        "passed": bool(passed),
        "config": config,
        "report": body,
    }
