"""Exception types shared across the toolkit."""


class GknetError(Exception):
    """Base class for toolkit-specific failures."""


class UnknownVariableError(GknetError, ValueError):
    """A named variable does not exist in the distribution at hand."""


class NotInSupportError(GknetError, ValueError):
    """A symbol or tuple lies outside the structural support."""


class BindingError(GknetError, ValueError):
    """Sources, terminals, or side variables cannot be matched up."""


class NestingError(GknetError, RuntimeError):
    """Equivalence classes of two partitions fail to nest."""


class InvalidInputError(GknetError, ValueError):
    """Encoder input violates the joint-support precondition."""


class DecodeError(GknetError):
    """A bitstream or packet set cannot be decoded."""


class DeliveryError(GknetError):
    """A network session cannot support or deliver the requested streams."""
