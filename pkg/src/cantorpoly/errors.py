"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition."""


class RangeOverflowError(ArithmeticError):
    """An iterated map evaluation left the representable range."""


class ConvergenceError(RuntimeError):
    """An iterative procedure exhausted its budget without converging.

    Carries whatever diagnostic payload the failing routine attached,
    e.g. the last two coefficient iterates of a stabilization loop.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics
