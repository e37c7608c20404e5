"""Exception hierarchy shared by all tempocorr modules."""

from __future__ import annotations


class TempocorrError(Exception):
    """Base class for all errors raised by this package."""


# --- quantum objects ---------------------------------------------------------

class WrongDimension(TempocorrError):
    """Matrix or vector has the wrong shape for the requested operation."""


class DimensionMismatch(TempocorrError):
    """Operands act on spaces of different dimension."""


class NotHermitian(TempocorrError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class SpectrumOutOfRange(TempocorrError):
    """Eigenvalues fall outside the admissible interval."""


class TraceNotOne(TempocorrError):
    """Density matrix trace deviates from 1 beyond tolerance."""


class NotTracePreserving(TempocorrError):
    """Kraus operators do not sum to a trace-preserving map."""


class NormTooLarge(TempocorrError):
    """Bloch vector lies outside the unit ball beyond tolerance."""


class ParamOutOfRange(TempocorrError):
    """Scalar parameter outside its admissible range."""


# --- classical polytope ------------------------------------------------------

class ShapeMismatch(TempocorrError):
    """Probability table shape does not match its scenario."""


class NotAMember(TempocorrError):
    """Behavior violates positivity, normalization, or arrow-of-time constraints."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnnormalizedConditional(TempocorrError):
    """Conditional distribution is negative or does not sum to 1."""


class TooManyVertices(TempocorrError):
    """Vertex count exceeds the enumeration cap."""

    def __init__(self, count, cap):
        super().__init__(f"scenario has {count} vertices, above the cap {cap}")
        self.count = count
        self.cap = cap


# --- quantum realization -----------------------------------------------------

class UnsupportedLength(TempocorrError):
    """Operation implemented only for sequence length 2."""


class EmptyDecomposition(TempocorrError):
    """Convex decomposition contains no vertices."""


# --- witnesses ---------------------------------------------------------------

class ScenarioMismatch(TempocorrError):
    """Witness functional and behavior belong to different scenarios."""


class InvalidStrategy(TempocorrError):
    """Qubit strategy violates its parameter constraints."""


class DomainError(TempocorrError):
    """Profile argument outside its closed-form domain."""


class NoValidRoot(TempocorrError):
    """No polynomial root survives the derivative filter (implementation bug)."""


class NotAProjector(TempocorrError):
    """Matrix is not a Hermitian idempotent of the required rank."""


# --- serialization -----------------------------------------------------------

class SchemaError(TempocorrError):
    """JSON document violates the expected schema."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
