"""Exception taxonomy shared by every sigsal module."""


class SigsalError(Exception):
    """Base class for all engine errors."""


class FormatError(SigsalError):
    """Malformed or truncated file content."""


class UnsupportedDtype(SigsalError):
    """Interchange file stores an element type other than little-endian float64."""


class UnsupportedFormat(SigsalError):
    """Recognized container but an unsupported variant (e.g. PGM maxval != 255)."""


class IoError(SigsalError):
    """Underlying I/O failure while writing an artifact."""


class InvalidShape(SigsalError):
    """Array rank or dimensions violate an operation's contract."""


class InvalidValue(SigsalError):
    """Array contents violate an operation's contract (NaN/Inf, out of range)."""


class InvalidBasis(SigsalError):
    """Spectral tensor passed where the opposite basis was required."""


class DegenerateInput(SigsalError):
    """Input carries no usable signal (zero vector, constant ranks, ...)."""


class ShapeError(SigsalError):
    """Model layers or weights do not compose."""


class MissingWeight(SigsalError):
    """Model descriptor references a weight tensor that is not on disk."""


class UnknownLayer(SigsalError):
    """Layer name or kind not known to the inference engine."""


class NotParametric(SigsalError):
    """Randomization requested for a layer without weights."""


class NoComponents(SigsalError):
    """No threshold in the sweep produced any connected component."""


class NoData(SigsalError):
    """Evaluation requested over an empty record stream."""


class InvalidSpec(SigsalError):
    """Mixture specification out of bounds (support sizes, signal length)."""
