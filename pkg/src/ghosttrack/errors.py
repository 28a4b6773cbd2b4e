"""Exception types shared across the package.

Plain ``ValueError`` is used for bad call arguments (mismatched lengths,
out-of-range indices). The classes below mark conditions the CLI maps to
dedicated exit codes.
"""


class ConfigError(ValueError):
    """A configuration value violates its documented constraints."""


class DegenerateImageError(RuntimeError):
    """A reconstruction carries no positive signal, so it cannot be localized.

    ``segment`` is attached by the episode runner when the failure occurs
    inside a segmented run; it stays ``None`` for direct calls.
    """

    def __init__(self, message: str, segment: int | None = None):
        super().__init__(message)
        self.segment = segment
