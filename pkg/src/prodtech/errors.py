"""Exception hierarchy shared by all prodtech modules."""


class ProdtechError(Exception):
    """Base class for all errors raised by this package."""


class ParamDomain(ProdtechError, ValueError):
    """A parameter is outside its admissible domain."""


class NonPositiveInput(ParamDomain):
    """An input quantity is zero or negative where a positive value is required."""


class DimensionMismatch(ProdtechError, ValueError):
    """Array shapes or lengths do not agree."""


class DegenerateTechnology(ProdtechError, ValueError):
    """The focal output row has no positive requirement, so output is unbounded."""


class UnsupportedDimension(ProdtechError, ValueError):
    """The requested operation does not support this number of outputs."""


class LevelNotBracketed(ProdtechError, RuntimeError):
    """The target level is not attained within the search bracket on a ray."""


class NonMonotoneRay(ProdtechError, RuntimeError):
    """The surface decreases along a scanned ray where an increase was required."""


class EmptyLevelSet(ProdtechError, RuntimeError):
    """No grid cell brackets the requested level (or the level set is degenerate)."""


class ConfigError(ProdtechError, ValueError):
    """A run configuration is invalid or incomplete."""


class UnknownFigure(ConfigError):
    """The requested figure id is not one of the supported figures."""
