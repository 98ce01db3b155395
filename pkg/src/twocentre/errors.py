"""Exception types shared across the library."""


class DomainError(ValueError):
    """Input lies outside the admissible coordinate/parameter domain."""


class CollisionError(DomainError):
    """Configuration is on (or numerically indistinguishable from) a collision set."""


class NumericsError(RuntimeError):
    """An iterative procedure failed to converge or lost all precision."""
