"""Exception types raised across the package."""


class CsvqeError(Exception):
    """Base class for package errors."""


class FcidumpParseError(CsvqeError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnsupportedSystemError(CsvqeError):
    """Open-shell or otherwise unsupported electronic structure input."""


class DegenerateDenominatorError(CsvqeError, ArithmeticError):
    pass


class DegenerateOverlapError(CsvqeError, ArithmeticError):
    """No overlap eigenvalue survives the threshold projection."""


class CapacityError(CsvqeError):
    pass


class ConfigError(CsvqeError, ValueError):
    pass
