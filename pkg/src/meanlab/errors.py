"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: parse/usage problems exit 1,
violated preconditions and evaluation failures exit 2, resource limits exit 3.
"""


class MeanlabError(Exception):
    """Base class for all package errors."""


class SpecParseError(MeanlabError):
    """A function-spec expression failed to parse.

    Carries the byte offset of the offending token in ``offset``.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class PreconditionError(MeanlabError):
    """An operation was called outside its contract (bad range, empty grid,
    degenerate variance, sifting modulus with a prime factor beyond x, ...)."""


class EvaluationError(MeanlabError):
    """A numeric evaluation failed: a rule produced a non-finite value, a
    local factor vanished, or a local sum did not converge."""


class ResourceError(MeanlabError):
    """A build would exceed the configured memory budget."""
