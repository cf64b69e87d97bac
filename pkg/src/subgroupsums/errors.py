class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class DivisibilityError(DomainError):
    pass


class InvarianceError(DomainError):
    """A set that should be invariant under a subgroup is not."""


class CapacityError(ValueError):
    """Input exceeds a desk-scale size guard."""


class ConsistencyError(RuntimeError):
    """Two exact routes disagreed; indicates a bug, never bad input."""
