"""Exception hierarchy shared by all modules."""


class SphereFieldError(Exception):
    """Base class for every error raised by spherefields."""


class DimensionMismatch(SphereFieldError, ValueError):
    pass


class ParseError(SphereFieldError, ValueError):
    """Raised for malformed polynomial or field text.

    ``position`` is a 0-based offset into the text; ``line`` and ``column``
    are 1-based.
    """

    def __init__(self, message, text="", position=0):
        self.position = position
        self.line = text.count("\n", 0, position) + 1
        self.column = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")


class NotDivisible(SphereFieldError, ArithmeticError):
    pass


class ClearingFailed(NotDivisible):
    """The clearing power is too small to make a rational substitution polynomial."""


class NotTangent(SphereFieldError):
    pass


class NotTangentEverywhere(SphereFieldError):
    pass


class HypothesisViolated(SphereFieldError):
    pass


class InternalInconsistency(SphereFieldError, AssertionError):
    pass


class NotSkew(SphereFieldError, ValueError):
    pass


class NotInvariant(SphereFieldError):
    pass


class NotFirstIntegral(SphereFieldError):
    def __init__(self, index, message=""):
        self.index = index
        super().__init__(message or f"integral #{index} is not a first integral")


class IndependenceNotCertified(SphereFieldError):
    pass


class NotHomogeneous(SphereFieldError):
    pass


class DependentBasis(SphereFieldError, ValueError):
    pass


class ZeroExtactic(SphereFieldError):
    pass


class EmptySection(SphereFieldError, ValueError):
    pass


class NotDegreeOneHomogeneous(SphereFieldError):
    pass


class NotInvariantEquator(SphereFieldError):
    pass


class StructureViolation(SphereFieldError, AssertionError):
    pass


class DivisionFailed(SphereFieldError):
    pass


class OddDimension(SphereFieldError, ValueError):
    pass


class BadDegree(SphereFieldError, ValueError):
    pass


class BadParameters(SphereFieldError, ValueError):
    pass
