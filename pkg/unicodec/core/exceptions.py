"""Exception classes for unicodec."""

from typing import Optional


class UnicodecException(Exception):
    """unicodec base exception"""
    pass


class DomainError(UnicodecException, ValueError):
    """An argument lies outside the domain of an operation."""
    pass


class ConstructionError(UnicodecException):
    """A code, chain or permutation group cannot be built from the given description."""
    pass


class ParseError(UnicodecException):
    """A code or matrix file is malformed."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(UnicodecException):
    """An experiment or scheme configuration is invalid or unresolvable."""
    pass


class SimulationError(UnicodecException):
    """A Monte-Carlo run failed after startup."""
    pass
