"""Exception hierarchy shared by all modules."""


class OrbitCodesError(Exception):
    """Base class for errors raised by orbitcodes."""


class FieldError(OrbitCodesError, ValueError):
    """Invalid field parameters or defining polynomial."""


class PreconditionError(OrbitCodesError, ValueError):
    """An operation was called outside its domain (e.g. k > n/2)."""


class SameOrbitError(OrbitCodesError, ValueError):
    """Two generators were expected to lie in distinct orbits but do not."""


class MixedStabilizerError(OrbitCodesError, ValueError):
    """Generators of a union code have different stabilizer degrees."""


class InfeasibleSearchError(OrbitCodesError, RuntimeError):
    """A sweep would exceed the configured candidate ceiling."""
