"""Error hierarchy shared across the package.

The CLI maps these to exit codes: validation problems exit 1, I/O problems
exit 2 (plain OSError), anything else exits 3.
"""


class RolescoutError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(RolescoutError):
    """Invalid input data, configuration, or arguments."""


class ParseError(ValidationError):
    """Malformed ingest stream; carries the offending position."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(ValidationError):
    """Invalid registry, combination spec, role graph, or league spec."""


class InternalError(RolescoutError):
    """An internal invariant was violated; indicates a bug."""
