"""Exception hierarchy shared by the whole package."""


class MorseHomologyError(Exception):
    pass


# int_linalg
class DimensionMismatch(MorseHomologyError, ValueError):
    pass


class CompositionNonzero(MorseHomologyError, ValueError):
    pass


# chain_complex
class ComplexError(MorseHomologyError, ValueError):
    pass


class DuplicateLabel(ComplexError):
    pass


class NonConsecutiveIndices(ComplexError):
    pass


class UnknownGenerator(ComplexError):
    pass


class BoundarySquareNonzero(ComplexError):
    """Raised when some coefficient of d_{k-1} d_k is nonzero.

    ``source``/``target`` are the labels of the offending pair (xi, zeta) and
    ``coefficient`` the value of <d d xi, zeta>.
    """

    def __init__(self, source, target, coefficient, degree):
        self.source = source
        self.target = target
        self.coefficient = coefficient
        self.degree = degree
        super().__init__(
            f"boundary squared is nonzero: <dd {source}, {target}> = {coefficient} "
            f"(degree {degree} -> {degree - 2})"
        )


class SerializationError(MorseHomologyError, ValueError):
    pass


# kunneth
class TorsionNotSupported(MorseHomologyError):
    pass


# orientation
class DependentFrames(MorseHomologyError, ValueError):
    pass


class SpanMismatch(MorseHomologyError, ValueError):
    pass


# geometry
class GeometryError(MorseHomologyError):
    pass


class BasePointOnSurface(GeometryError, ValueError):
    pass


class DegenerateCriticalPoint(GeometryError):
    def __init__(self, location, eigenvalues):
        self.location = location
        self.eigenvalues = eigenvalues
        super().__init__(
            f"degenerate critical point near {tuple(round(float(x), 6) for x in location)} "
            f"(Hessian eigenvalues {[float(e) for e in eigenvalues]}); "
            "perturb the base point p and rerun"
        )


class NoConvergence(GeometryError):
    pass


class IntegrationEscaped(GeometryError):
    pass


class AmbiguousArrival(GeometryError):
    pass


class MorseSmaleViolation(GeometryError):
    def __init__(self, source, target):
        self.source = source
        self.target = target
        super().__init__(
            f"flow line from {source} reaches {target} of the same or higher index; "
            "the gradient is not Morse-Smale for this base point, perturb p"
        )


# blowup
class FlowGraphError(MorseHomologyError, ValueError):
    pass


class NoUniqueMinimum(FlowGraphError):
    pass


class UnorderedIndices(FlowGraphError):
    pass


class UnknownLabel(FlowGraphError, KeyError):
    pass
