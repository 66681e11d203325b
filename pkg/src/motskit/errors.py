"""Exception hierarchy shared by all motskit modules."""


class MotsKitError(Exception):
    """Base class for all motskit errors."""


class InvalidParam(MotsKitError, ValueError):
    pass


class DomainError(MotsKitError, ValueError):
    """A point lies outside the chart domain of a metric."""


class DegenerateMetric(MotsKitError, ArithmeticError):
    """Metric failed positive-definiteness (Cholesky) at a point."""


class NonFiniteDerivative(MotsKitError, ArithmeticError):
    pass


class DegeneratePlane(MotsKitError, ValueError):
    pass


class RankDeficientImmersion(MotsKitError, ArithmeticError):
    pass


class UnsupportedTopology(MotsKitError, ValueError):
    pass


class UnknownFamily(MotsKitError, KeyError):
    pass


class NumericalError(MotsKitError, ArithmeticError):
    """Numerical breakdown (as opposed to a failed scientific check)."""


class ComplexPrincipal(NumericalError):
    """No real eigenvalue among those with the smallest real part."""


class NonPositiveEigenfunction(NumericalError):
    pass


class GeodesicExitedDomain(NumericalError):
    pass


class CausticDetected(NumericalError):
    """The normal exponential map degenerates (focal point)."""


class ResidualExceeded(MotsKitError, AssertionError):
    pass
