"""Exception hierarchy shared by every module of the package."""


class MonotoneIterError(Exception):
    """Base class for all errors raised by monotone_iter."""


class InvalidInterval(MonotoneIterError):
    """An order interval [lo, hi] was built with lo not below hi."""


class AbsentSupremum(MonotoneIterError):
    """The universe cannot certify that a supremum (or infimum) exists."""


class UniverseMismatch(MonotoneIterError):
    pass


class InfiniteUniverseExhaustive(MonotoneIterError):
    """Exhaustive enumeration was requested on a universe that is not finite."""


class NondeterministicOperator(MonotoneIterError):
    pass


class PreconditionOrder(MonotoneIterError):
    """A start pair (x0, y0) does not satisfy x0 <= y0."""


class MonotonicityViolation(MonotoneIterError):
    """The iteration produced evidence that the operator is not mixed monotone."""


class InvalidPoset(MonotoneIterError):
    def __init__(self, verdict):
        super().__init__(f"not a partial order: {verdict.axiom} fails at {verdict.witness}")
        self.verdict = verdict


class ShapeError(MonotoneIterError):
    pass


class DimensionMismatch(MonotoneIterError):
    pass


class ZeroElement(MonotoneIterError):
    pass


class InvalidPhi(MonotoneIterError):
    """A comparison function violates phi(l) > l or phi(l) <= 1 on the check grid."""


class NotLinked(MonotoneIterError):
    """Two cone elements lie in different parts of the cone."""


class Underflow(MonotoneIterError):
    pass


class CertificateViolation(MonotoneIterError):
    """The lambda certificate x_n >= lambda_n * y_n failed during a solve."""


class NonConvergence(MonotoneIterError):
    pass


class ProblemSpecError(MonotoneIterError):
    """A problem file or CLI problem reference is malformed."""
