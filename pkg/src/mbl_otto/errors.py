"""Exception taxonomy shared by all modules."""


class ParameterError(ValueError):
    """An argument violates an operation's preconditions."""


class StateError(ValueError):
    """A density matrix fails a structural requirement (trace, diagonality)."""


class StatisticsError(ValueError):
    """Too few samples for a reliable statistical estimate."""


class NumericError(RuntimeError):
    """A numerical routine failed; carries the offending realization's seed tag."""

    def __init__(self, message, seed_tag=None):
        super().__init__(message)
        self.seed_tag = seed_tag


class ResourceError(RuntimeError):
    """A requested computation exceeds hard resource limits."""
