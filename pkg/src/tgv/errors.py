"""Exception types raised by the package."""


class ArgumentError(ValueError):
    """An argument violates the documented contract of an operation."""


class CapacityError(ArgumentError):
    """A requested order exceeds a documented practical cap."""


class ConsistencyError(ValueError):
    """Input data fails a numerical consistency requirement."""


class PgmParseError(ValueError):
    """Malformed or unsupported PGM data.

    ``offset`` is the byte position where parsing failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
