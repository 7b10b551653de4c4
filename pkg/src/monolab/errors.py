"""Exception hierarchy shared across the package."""


class MonolabError(Exception):
    """Base class for every error raised by monolab."""


class ParseError(MonolabError):
    """Malformed expression text.

    Carries the byte offset of the failure and the set of token kinds
    that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at byte {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)
        self.offset = offset
        self.expected = tuple(expected)


class DomainError(MonolabError):
    """Evaluation left the real domain (ln of a nonpositive value, etc.)."""


class DivisionByZero(MonolabError):
    """Exact zero denominator during scalar evaluation."""


class UnboundParameter(MonolabError):
    """An expression parameter has no value in the binding."""


class InvalidParameter(MonolabError):
    """A parameter value outside the allowed set (e.g. alpha = 0)."""


class OrderTooLarge(MonolabError):
    """Requested derivative / partition order exceeds the configured cap."""


class MismatchedJets(MonolabError):
    """Binary jet operation on jets with different base point, order or precision."""


class NearSingular(MonolabError):
    """Jet division by a leading coefficient too close to zero to trust."""


class InsufficientDerivatives(MonolabError):
    """A derivative sequence is too short for the requested order."""


class NonPositiveValue(MonolabError):
    """A quantity that must be strictly positive was not."""


class PoleError(MonolabError):
    """Evaluation exactly at a pole of a closed-form formula."""


class BranchError(MonolabError):
    """Point outside both admissible branches of an integral representation."""


class QuadratureNonConvergence(MonolabError):
    """Panel doubling exhausted without meeting the convergence target."""


class ConfigError(MonolabError):
    """Invalid run configuration (CLI flags, request fields)."""
