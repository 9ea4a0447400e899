"""Exception types shared across the package."""


class DenseCodingError(Exception):
    """Base class for all package errors."""


class InputError(DenseCodingError, ValueError):
    """An argument is out of range or inconsistent with the object it refers to."""


class ContractViolation(DenseCodingError, ValueError):
    """An object fails an invariant it is required to satisfy (hermiticity, norm, trace)."""


class CapacityError(DenseCodingError, MemoryError):
    """The requested Hilbert space is larger than the dense backend allows."""

    def __init__(self, dimension: int, limit: int):
        self.dimension = dimension
        self.limit = limit
        super().__init__(
            f"dense operator of dimension {dimension} exceeds the limit of {limit}"
        )


class ConfigError(DenseCodingError, ValueError):
    """A sweep configuration is invalid. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
