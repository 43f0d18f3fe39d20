class BudgetExceeded(RuntimeError):
    """A computation was refused because its size exceeds the configured budget."""


class GameError(ValueError):
    """A game (or game file) violates the data-model invariants."""
