"""Exception hierarchy for ellipwire."""


class EllipwireError(Exception):
    """Base class for all package errors."""


class DegenerateAnisotropy(EllipwireError, ValueError):
    """Masses are equal within the anisotropy guard; the focal distance vanishes."""


class InvalidField(EllipwireError, ValueError):
    """Field outside the weak-field regime c/L_B < 1."""


class DomainOverflow(EllipwireError, ValueError):
    pass


class OrderTooLarge(EllipwireError, ValueError):
    pass


class NoConvergence(EllipwireError, RuntimeError):
    pass


class NoSignChange(EllipwireError, ValueError):
    pass


class MaxIterations(EllipwireError, RuntimeError):
    pass


class SingularJacobian(EllipwireError, RuntimeError):
    pass


class LeftBounds(EllipwireError, RuntimeError):
    pass


class NoRealRoot(EllipwireError, ValueError):
    pass


class BandExceedsDomain(EllipwireError, ValueError):
    pass


class ConvergenceFailure(EllipwireError, RuntimeError):
    pass
