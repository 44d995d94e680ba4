"""Exception types shared across the package."""


class DomainError(ValueError):
    """An evaluation point lies outside the admissible domain."""


class ParameterError(ValueError):
    """A family parameter (lambda, rho, ...) is outside its admissible set."""


class ValidityError(ValueError):
    """A bound was requested below the degree threshold of its theorem."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical procedure did not reach its tolerance.

    Attributes
    ----------
    achieved : float
        Best tolerance reached before giving up.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved
