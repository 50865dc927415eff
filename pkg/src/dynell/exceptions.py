"""Exception hierarchy shared by all dynell modules."""


class DynellError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(DynellError, ValueError):
    """A global parameter violates its invariant (e.g. Im(tau) <= 0)."""


class CapabilityError(DynellError, ValueError):
    """A request exceeds a configured truncation/derivative capability."""


class SingularityError(DynellError, ValueError):
    """An evaluation point is too close to a theta-singular locus.

    ``factor`` names the vanishing theta argument so that sampling drivers
    can skip instead of crash.
    """

    def __init__(self, message: str, factor: str | None = None):
        super().__init__(message)
        self.factor = factor


class DomainError(DynellError, ValueError):
    """An algebraic operation is undefined for its operand (e.g. 1/0 series)."""


class PrecisionError(DynellError, ValueError):
    """A truncated result does not cover the coefficient window required."""


class ConditioningError(DynellError, ValueError):
    """A linear solve is too ill-conditioned to trust.

    Carries the estimated condition number.
    """

    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number
