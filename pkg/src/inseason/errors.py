"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (bad input or parameters,
CLI exit code 2) and :class:`DegenerateDataError` (valid input on which
thresholding is undefined, CLI exit code 3).
"""


class InSeasonError(Exception):
    """Base class for all errors raised by this package."""


class InputError(InSeasonError, ValueError):
    """Invalid input data, file content or parameter."""


class GapError(InputError):
    def __init__(self, missing_date, position=None):
        self.missing_date = missing_date
        self.position = position
        super().__init__(f"missing day {missing_date.isoformat()}")


class DuplicateDateError(InputError):
    def __init__(self, duplicate_date, position=None):
        self.duplicate_date = duplicate_date
        self.position = position
        super().__init__(f"duplicate date {duplicate_date.isoformat()}")


class NonPositiveError(InputError):
    def __init__(self, index, value):
        self.index = index
        self.position = index
        self.value = value
        super().__init__(f"value at index {index} must be a finite positive number, got {value!r}")


class IndexOutOfRange(InputError, IndexError):
    pass


class TooShortError(InputError):
    pass


class LengthMismatch(InputError):
    pass


class DomainError(InputError):
    """Parameter outside its mathematical domain (e.g. k not in [0, 1])."""


class ConfigError(InputError):
    pass


class IncompleteWeekError(InputError):
    pass


class FormatError(InputError):
    """Malformed file content; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class DegenerateDataError(InSeasonError):
    pass


class ZeroVarianceError(DegenerateDataError):
    """Residuals have zero spread, so a z-threshold is undefined."""
