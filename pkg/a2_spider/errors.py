"""Domain exceptions raised by the spider engine."""


class A2Error(ValueError):
    """Base class for every domain error reported by the engine."""


class BoundaryMismatchError(A2Error):
    """Raised when two diagrams are glued along incompatible sign words."""


class ParseError(A2Error):
    """Raised when a PD code, web document or link spec cannot be read."""


class EmbeddingError(A2Error):
    """Raised when rotation data does not describe a planar embedding."""


class UndefinedDegreeError(A2Error):
    """Raised when the minimum degree of the zero scalar is requested."""


class DivisionError(A2Error):
    """Raised when an exact polynomial division leaves a remainder."""


class IntegralityError(A2Error):
    """Raised when a normalized invariant has non-integral coefficients or powers."""


class StabilityError(A2Error):
    """Raised when a tail prefix is requested for an unstable sequence."""


class UnknownNameError(A2Error, LookupError):
    """Raised for unknown formulas, identities, crossings or library links."""
