"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best available estimate and the last observed error bound
    so callers can decide whether the partial result is still usable.
    """

    def __init__(self, message, best_estimate=None, error_bound=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_bound = error_bound


class ConfigError(ValueError):
    """A run configuration failed validation.

    ``errors`` is a list of human-readable messages, each prefixed with the
    dotted path of the offending field.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SolverError(RuntimeError):
    """A solver left its validity envelope (non-finite state, step underflow
    outside a detected blow-up, or an exhausted step budget)."""


class IntegrityError(RuntimeError):
    """A persisted artifact does not match its recorded digest."""
