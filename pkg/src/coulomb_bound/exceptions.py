class DomainError(ValueError):
    """Input outside the domain of an operation."""


class DivergenceError(DomainError):
    """A functional is infinite for the given input."""


class CoarseGridWarning(UserWarning):
    """Quadrature resolution too low for the requested accuracy."""
