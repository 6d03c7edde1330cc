"""Exception hierarchy shared by all metrivec modules."""

__all__ = [
    "MetrivecError",
    "DomainError",
    "StructuralError",
    "InvariantError",
    "CapabilityError",
    "ConstructionError",
]


class MetrivecError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MetrivecError, ValueError):
    """An argument lies outside the domain of an operation (e.g. ``a >= b``)."""


class StructuralError(MetrivecError, TypeError):
    """A vector does not have the representation its space expects."""


class InvariantError(MetrivecError, ValueError):
    """A constructed object would violate one of its invariants."""


class CapabilityError(MetrivecError):
    """The integrand or space lacks a feature the operation needs."""


class ConstructionError(MetrivecError):
    """An explicit construction (adversarial tags, witnesses) could not be completed."""
