"""Exception types raised by lpreduce."""


class ValidationError(ValueError):
    """Invalid argument, configuration, or input data."""


class ConstructionError(RuntimeError):
    """The snowflake builder hit its frequency cap without passing its audit."""

    def __init__(self, message, best_min_ratio=None, best_max_ratio=None):
        super().__init__(message)
        self.best_min_ratio = best_min_ratio
        self.best_max_ratio = best_max_ratio


class SparsifierBreakdown(RuntimeError):
    """Numerical breakdown inside the barrier sparsifier.

    In exact arithmetic some vector always qualifies at every step, so this
    only fires when rounding has destroyed the barrier invariants.
    """

    def __init__(self, message, step=None, lower=None, upper=None):
        super().__init__(message)
        self.step = step
        self.lower = lower
        self.upper = upper
