"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model or job parameters."""


class ContractError(ValueError):
    """A caller violated an operation's precondition."""


class CapacityError(RuntimeError):
    """Requested problem size exceeds the supported dense/compile limits."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance.

    Carries the best residual achieved in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SchemaError(ValueError):
    """A job config failed schema validation. ``field_path`` names the offender."""

    def __init__(self, message, field_path=""):
        super().__init__(message)
        self.field_path = field_path
