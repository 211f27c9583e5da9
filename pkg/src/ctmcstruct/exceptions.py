"""Error types.  The CLI maps these onto exit codes."""


class CtmcStructError(Exception):
    """Base class for all package errors."""


class InputError(CtmcStructError, ValueError):
    """Malformed or invalid input (exit code 2)."""


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.detail = message


class NotApplicableError(CtmcStructError, ValueError):
    """The requested analysis needs a structural property the input lacks."""


class BudgetExceededError(CtmcStructError):
    """An oracle box would exceed the configured state budget (exit code 3)."""

    def __init__(self, volume: int, budget: int):
        super().__init__(f"exploration box has {volume} states, budget is {budget}")
        self.volume = volume
        self.budget = budget
