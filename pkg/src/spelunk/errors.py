"""Exception types shared across the package."""


class SpelunkError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SpelunkError):
    """A weight file is malformed or does not match the schema."""


class DimensionMismatch(SpelunkError):
    """Layer shapes do not chain, or an input has the wrong dimension."""


class NonFiniteWeight(SpelunkError):
    """A weight file contains NaN or infinite entries."""


class InvalidParameter(SpelunkError):
    """An argument is outside its documented range."""


class UnsupportedActivation(SpelunkError):
    """No range-analysis rule is registered for this activation."""


class NonOrthogonalAxes(SpelunkError):
    """Query box axes are not pairwise orthogonal (or one is zero)."""


class IndexOutOfRange(SpelunkError):
    """A coefficient index does not exist in the affine form."""


class InvalidRay(SpelunkError):
    """Ray direction is not a finite unit vector."""


class InvalidCamera(SpelunkError):
    """Camera parameters are degenerate or incompatible with the mode."""


class InvalidBounds(SpelunkError):
    """An axis-aligned box has inverted or non-finite corners."""


class DepthOverflow(SpelunkError):
    """A fixed subdivision depth exceeds the supported maximum."""


class OnSurface(SpelunkError):
    """The query point evaluates to exactly zero."""


class EmptyBand(SpelunkError):
    """No near-surface region survives, or the sample budget ran out."""


class NoSurfaceFound(SpelunkError):
    """The whole domain was certified single-signed; no level set inside."""


class ResolutionTooSmall(SpelunkError):
    """Mesh resolution exponent must exceed the dense-extraction levels."""


class NoNetworks(SpelunkError):
    """A benchmark or fuzz run was given an empty network list."""


class InvalidImage(SpelunkError):
    """Image buffer is empty or inconsistent with its declared size."""
