"""Exception types shared across the package."""


class CatcohomError(Exception):
    """Base class for every error raised on purpose by this package."""


class InvalidInputError(CatcohomError, ValueError):
    """Malformed or inconsistent input (non-composable tuple, dimension mismatch, ...)."""


class CapacityError(CatcohomError):
    """A computation would exceed the configured basis-size cap."""


class UnsupportedDegreeError(CatcohomError):
    pass


class UnsupportedElementError(CatcohomError):
    """Groupoid elements outside the cylinder forms an operation knows how to handle."""


class DepthExhaustedError(CatcohomError):
    """An alignment search ran past its depth bound without an answer."""


class NotACocycleError(CatcohomError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class StabilizationError(CatcohomError):
    """The kernel chain of a period map did not stabilize within the iteration cap."""
