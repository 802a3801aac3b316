"""Exception types shared across the library."""


class AriadneError(Exception):
    """Base class for all library errors."""


class Unreachable(AriadneError):
    """No path exists between the requested maze cells."""


class Infeasible(AriadneError):
    """The requested (steps, turns) difficulty cannot be realized."""


class InvalidConfig(AriadneError):
    """A configuration object violates its invariants."""


class ConfigError(AriadneError):
    """A config file entry is unknown or invalid."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        super().__init__(message)


class ParseError(AriadneError):
    """A serialized file is malformed.  Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class VersionMismatch(AriadneError):
    """Checkpoint magic header does not match this library version."""


class CorruptCheckpoint(AriadneError):
    """Checkpoint file is truncated or contains invalid values."""


class DimensionMismatch(AriadneError):
    """An input vector does not match the policy's expected dimensions."""


class GroupTooSmall(AriadneError):
    """Advantage normalization needs at least two rewards."""


class InvalidLength(AriadneError):
    """Path lengths for the efficiency ratio must be positive."""


class UsageError(AriadneError):
    """Bad command-line arguments (maps to exit code 1)."""
