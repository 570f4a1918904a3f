"""Exception types shared across the package."""


class TCIsingError(Exception):
    """Base class for all errors raised by this package."""


class EmptySectorError(TCIsingError):
    """No basis state satisfies the requested charge constraints."""


class BeyondCapacityError(TCIsingError):
    """Chain too long for single-machine-word spin configurations (N > 30)."""


class SectorMismatchError(TCIsingError):
    """Operator or state does not fit the given basis (wrong charge/N/cutoff,
    or a term would connect states outside the basis)."""


class BadParityError(TCIsingError):
    """Meson/domain-wall position incompatible with the reference Neel state."""


class DimTooLargeError(TCIsingError):
    """Dense computation requested above the configured size limit."""


class NoConvergenceError(TCIsingError):
    """Iterative eigensolver did not converge."""


class StepFailureError(TCIsingError):
    """Krylov propagator could not meet the error tolerance."""


class BandFloorExceededError(TCIsingError):
    """Probability leaked below the lowest charge sector of a band exceeds
    the configured bound."""


class ConfigError(TCIsingError):
    """Run-configuration file is malformed or contains unknown keys."""


class EmptyAcceptanceWarning(UserWarning):
    """A post-selection time bin has zero accepted snapshots."""
