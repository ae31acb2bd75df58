"""Exception hierarchy shared by services and command handlers."""


class DomainError(ValueError):
    """An input lies outside the domain of a numerical operation."""


class IndeterminateStatisticError(DomainError):
    """A combination statistic has no defined value (e.g. +inf plus -inf)."""


class DegenerateSampleError(DomainError):
    """A sample cannot support the requested test (e.g. zero variance)."""


class TcctError(Exception):
    """Base class for failures surfaced by a command with an exit code."""

    exit_code: int = 1

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class UsageError(TcctError):
    """Bad invocation or configuration."""

    exit_code = 2


class MissingColumnError(UsageError):
    """A requested column is absent from the input header."""

    def __init__(self, column: str) -> None:
        super().__init__(f"Column not found in input: {column}")
        self.column = column


class ConfigError(UsageError):
    """An override does not form a valid scenario or option set."""


class DataError(TcctError):
    """Input data cannot be used as given."""

    exit_code = 3


class UnparseablePValueError(DataError):
    """A p-value cell is not a number in [0, 1]."""

    def __init__(self, row: int, value: object) -> None:
        super().__init__(f"Row {row}: p-value {value!r} is not a number in [0, 1]")
        self.row = row
        self.value = value
