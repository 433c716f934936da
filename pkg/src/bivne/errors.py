"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised for malformed documents and invalid parameters."""


class DomainError(ValueError):
    """Raised when a cost formula is evaluated outside its domain."""


class UnknownNodeError(KeyError):
    """Raised when a node identifier is not part of the substrate."""


class AllocationError(RuntimeError):
    """Raised when a solution fails validation at allocation time.

    ``violations`` holds ``(constraint, message)`` pairs.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        names = sorted({c for c, _ in self.violations})
        detail = "; ".join(f"{c}: {m}" for c, m in self.violations)
        super().__init__(f"rejected by {', '.join(names)} ({detail})")
