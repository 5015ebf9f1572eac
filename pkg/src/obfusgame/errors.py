"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed or inconsistent configuration.

    ``line`` carries the 1-based line number when the error comes from a
    config file, so the CLI can print a line-anchored message.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NoFiniteOptimumError(ValueError):
    """A user's utility has no finite maximizer (zero accuracy cost but
    positive privacy stake)."""


class ConvergenceError(RuntimeError):
    """An iterative solve ran out of its iteration budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GridTooLargeError(RuntimeError):
    """A brute-force grid would exceed the evaluation budget."""


class SolverError(RuntimeError):
    """Internal solver failure (non-finite utilities, empty candidates)."""
