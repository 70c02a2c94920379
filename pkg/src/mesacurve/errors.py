"""Exception hierarchy shared across the package."""


class MesaCurveError(Exception):
    """Base class for all errors raised by mesacurve."""


class RankMismatch(MesaCurveError, ValueError):
    pass


class GraphError(MesaCurveError, ValueError):
    pass


class MesaError(MesaCurveError, ValueError):
    """A candidate section does not have mesa shape.

    ``code`` is one of the ``MesaError.*`` constants so callers can branch
    without parsing messages.
    """

    NOT_CONNECTED = "not-connected"
    NOT_A_TREE = "quotient-not-tree"
    UNEQUAL_LENGTHS = "unequal-boundary-lengths"
    DEAD_END = "dead-end"
    NO_OUTSIDE = "no-outside-component"
    DEGENERATE = "degenerate-value"
    NO_UNIQUE_MAX = "no-unique-max"
    SHAPE_MISMATCH = "shape-mismatch"
    NONZERO_SLOPE = "nonzero-marking-slope"
    ZERO_GENUS = "zero-genus"

    def __init__(self, code, message, **details):
        super().__init__(message)
        self.code = code
        self.details = details


class PLViolation(MesaCurveError, ValueError):
    def __init__(self, message, edges=()):
        super().__init__(message)
        self.edges = tuple(edges)


class GeometryError(MesaCurveError, ValueError):
    pass


class NotAcyclicError(MesaCurveError):
    """The explicit realization has H^1 != 0, so boundary values lose their codimension."""


class TruncationError(MesaCurveError, ArithmeticError):
    pass


class InvariantBreach(MesaCurveError, AssertionError):
    """An internal invariant failed; this signals a bug or an inconsistent input that slipped validation."""


class DocumentError(MesaCurveError, ValueError):
    kind = "document"

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class DocumentSyntaxError(DocumentError):
    kind = "syntax"


class SchemaViolation(DocumentError):
    kind = "schema"


class IntegrityViolation(DocumentError):
    kind = "integrity"


class FamilyError(MesaCurveError, ValueError):
    """A family fails the mesa-curve structure (for instance, radii do not glue)."""
