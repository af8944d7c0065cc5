"""Exception hierarchy shared by every stage of the pipeline."""


class RClustError(Exception):
    """Base class for all errors raised by rclust."""


class ConfigError(RClustError, ValueError):
    """Invalid configuration value (bad label, bad kernel length, ...)."""


class DomainError(RClustError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DatasetTooShortError(RClustError, ValueError):
    """Series too short for the kernel's receptive field."""


class ShapeError(RClustError, ValueError):
    """Array shapes do not agree."""


class InsufficientDataError(RClustError, ValueError):
    pass


class DegenerateDataError(RClustError, ValueError):
    """Input has no variance where variance is required."""


class InfeasibleError(RClustError, ValueError):
    pass


class ParseError(RClustError, ValueError):
    """Malformed input file. Carries the offending path and position."""

    def __init__(self, message, path=None, line=None, column=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.column = column


class VariableLengthError(ParseError):
    """Rows of unequal width; variable-length datasets are not supported."""
