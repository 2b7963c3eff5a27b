class MixnormError(Exception):
    """Base class for every error raised by the numerical core."""


class DomainError(MixnormError, ValueError):
    """A parameter lies outside the domain of the operation."""


class ShapeError(MixnormError, ValueError):
    """Grids, masks or regions do not line up."""


class StateError(MixnormError):
    """A grid function is in the wrong space (physical vs frequency)."""


class ResolutionError(MixnormError):
    """The grid is too coarse or too small for the requested object."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class PreconditionError(MixnormError):
    """A hypothesis of an inequality or theorem does not hold."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EvaluationError(MixnormError):
    """A symbol produced a non-finite value."""

    def __init__(self, message, xi=None):
        super().__init__(message)
        self.xi = xi


class SymbolSyntaxError(MixnormError, ValueError):
    """A symbol expression could not be parsed."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position
