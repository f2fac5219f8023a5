"""Exception types shared across the package."""


class HopfLiftError(Exception):
    pass


class ValidationError(HopfLiftError, ValueError):
    """Invalid parameters or inputs (CLI exit code 2)."""


class DomainError(ValidationError):
    pass


class SingularBase(ValidationError):
    """Base point too close to (-1, 0, 0), where the fibre chart divides by zero."""


class CoincidentPoints(ValidationError):
    pass


class OddN(ValidationError):
    pass


class OddM(ValidationError):
    pass


class KTooSmall(ValidationError):
    pass


class NumericalError(HopfLiftError, ArithmeticError):
    """Numerical failure (CLI exit code 3)."""


class NonConvergence(NumericalError):
    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(f"{message} (best estimate {estimate!r}, error bound {error!r})")
        self.estimate = estimate
        self.error = error


class RejectionStall(NumericalError):
    pass


class SingularPair(NumericalError):
    pass
