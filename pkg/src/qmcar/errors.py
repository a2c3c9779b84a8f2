"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates an operation's precondition."""


class CostCapError(DomainError):
    """A requested computation exceeds its configured cost cap."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature stopped before reaching the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved
