class QuantumInterfaceError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidState(QuantumInterfaceError, ValueError):
    pass


class DimensionError(QuantumInterfaceError, ValueError):
    pass


class InvalidArgument(QuantumInterfaceError, ValueError):
    pass


class MonostableError(QuantumInterfaceError, ValueError):
    """The rf-SQUID potential has a single well (beta <= 1), so no qubit exists."""
