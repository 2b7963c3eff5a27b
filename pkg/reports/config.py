"""
Experiment configuration files.

A configuration file uses the same ``key = value`` syntax as a .env file;
dotted keys form sections (``grid.dims = 64,64``). Environment variables
with the same name override the file.
"""
import logging
import os

from decouple import Config, Csv, RepositoryEmpty, RepositoryEnv
from rest_framework import serializers

from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)

LIST_KEYS = (
    "a",
    "p",
    "t",
    "r",
    "grid.dims",
    "grid.extents",
    "ensemble.scales",
    "experiment.resolutions",
)
SCALAR_KEYS = (
    "q",
    "s",
    "alpha",
    "N",
    "J",
    "J_audit",
    "seed",
    "kind",
    "ensemble.count",
    "ensemble.width",
    "experiment.kind",
    "experiment.symbol",
    "checks.samples",
    "checks.fibers",
    "checks.fiber_length",
)
KNOWN_KEYS = LIST_KEYS + SCALAR_KEYS
SECTIONS = ("grid", "ensemble", "experiment", "checks")


def _repository(path):
    if path is None:
        return RepositoryEmpty()
    if not os.path.isfile(path):
        raise serializers.ValidationError({"config": f"no such file: {path}"})
    return RepositoryEnv(path)


def read_raw(path=None):
    """Unvalidated nested mapping from a config file and the environment."""
    repository = _repository(path)
    unknown = sorted(set(getattr(repository, "data", {})) - set(KNOWN_KEYS))
    if unknown:
        raise serializers.ValidationError({key: "unknown configuration key" for key in unknown})

    source = Config(repository)
    raw = {section: {} for section in SECTIONS}
    for key in KNOWN_KEYS:
        if key not in os.environ and key not in repository:
            continue
        value = source(key, cast=Csv()) if key in LIST_KEYS else source(key)
        if key in LIST_KEYS and not value:
            continue
        section, _, name = key.rpartition(".")
        (raw[section] if section else raw)[name] = value
    return raw


def load_config(path=None, seed=None):
    """Validated configuration; a seed given here wins over the file."""
    raw = read_raw(path)
    if seed is not None:
        raw["seed"] = seed
    serializer = ExperimentConfigSerializer(data=raw)
    serializer.is_valid(raise_exception=True)
    logger.debug("loaded configuration from %s", path or "defaults")
    return serializer
