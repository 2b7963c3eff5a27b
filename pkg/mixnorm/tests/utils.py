import numpy as np

from reports.serializers import ExperimentConfigSerializer

SMALL = {
    "grid": {"dims": [32], "extents": [4.0]},
    "ensemble": {"count": 3},
    "experiment": {},
    "checks": {"samples": 50, "fibers": 5, "fiber_length": 64},
}


def make_config(**overrides):
    """Validated configuration on a 32 x 32 grid; section keys use a double underscore (grid__dims)."""
    raw = {section: dict(values) for section, values in SMALL.items()}
    for key, value in overrides.items():
        section, _, name = key.partition("__")
        if name:
            raw[section][name] = value
        else:
            raw[key] = value
    serializer = ExperimentConfigSerializer(data=raw)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data


def gaussian(grid, width=1.0, centre=0.0):
    x = grid.mesh() - centre
    return np.exp(-0.5 * np.sum((x / width) ** 2, axis=-1))
