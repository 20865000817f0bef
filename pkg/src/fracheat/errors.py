"""Error taxonomy shared by all modules."""


class ConfigurationError(ValueError):
    """Malformed or out-of-budget setup (grid shape, schedule, mesh size)."""


class DomainError(ValueError):
    """Parameter outside the mathematical domain of the operation."""


class PreconditionError(ValueError):
    """Input data violates a stated precondition (sign, ordering, residual)."""


class NumericError(RuntimeError):
    """Computation failed to converge or produced non-finite values."""
