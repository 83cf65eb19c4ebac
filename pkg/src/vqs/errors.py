"""Exception hierarchy.

Numeric failures map to CLI exit code 1, configuration failures to exit code 2.
"""


class VQSError(Exception):
    """Base class for all errors raised by this package."""


class NumericError(VQSError):
    """A computation could not produce a finite, meaningful result."""


class NumericDomainError(NumericError, ZeroDivisionError):
    """An operation was evaluated outside its mathematical domain."""


class DegenerateStateError(NumericError):
    """The trial state has (numerically) zero norm, so the energy is undefined."""


class DivergenceError(NumericError):
    def __init__(self, iteration, value):
        super().__init__(f"non-finite loss {value!r} at iteration {iteration}")
        self.iteration = iteration
        self.value = value


class ConvergenceError(NumericError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ContractError(VQSError, ValueError):
    """A caller violated a documented precondition."""


class ConfigError(VQSError, ValueError):
    """Invalid configuration; ``line`` is set when the problem has a source line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
