"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class StabilityError(RuntimeError):
    """The drift matrix is not Hurwitz, so no steady state exists."""

    def __init__(self, max_real_part, message=None):
        self.max_real_part = float(max_real_part)
        super().__init__(
            message
            or f"drift matrix is not Hurwitz: max Re(lambda) = {self.max_real_part:.6g}"
        )


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or hit a singular system."""
