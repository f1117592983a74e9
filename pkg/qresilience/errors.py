"""Exception hierarchy for qresilience."""


class QResilienceError(Exception):
    """Base class for every error raised by the package."""


class DomainError(QResilienceError, ValueError):
    """A precondition on an argument was violated."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DegenerateConfigError(QResilienceError):
    """The configuration leaves nothing to normalize against."""


class NumericError(QResilienceError, ArithmeticError):
    """An iterative numeric routine failed to converge."""


class ChannelDropError(QResilienceError):
    """A classical message was lost; the distributed round is aborted."""

    def __init__(self, sender, round_index=None):
        where = f" in round {round_index}" if round_index is not None else ""
        super().__init__(f"message from node {sender} dropped{where}")
        self.sender = sender
        self.round_index = round_index


class UsageError(QResilienceError):
    """Invalid command-line parameters."""
