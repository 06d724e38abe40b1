"""Exception types raised by the toolkit."""


class LocOrthError(Exception):
    """Base class for toolkit errors."""


class InvalidStateError(LocOrthError, ValueError):
    """Input violates a density-operator or pure-state invariant."""


class ResourceCapError(LocOrthError):
    """A configured size cap (matrix dimension, count lattice) was exceeded."""


class NotLocallyOrthogonal(LocOrthError):
    """No local-orthogonality certificate exists for the ensemble.

    Raised by operations whose result is only claimed under the
    local-orthogonality hypothesis.
    """
