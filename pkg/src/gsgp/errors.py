"""Exception types shared across the package."""


class NonFiniteSemanticsError(ValueError):
    """A program produced NaN/Inf on some dataset row."""

    def __init__(self, message, split=None, row=None):
        super().__init__(message)
        self.split = split
        self.row = row


class EvalBudgetExceededError(RuntimeError):
    """naive_eval refused to expand an archive that is too large for it."""


class CsvFormatError(ValueError):
    """Malformed CSV input; message carries the offending position."""
