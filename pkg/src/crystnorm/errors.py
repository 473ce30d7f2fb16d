"""Exception types raised across the package."""


class CrystError(Exception):
    """Base class for all package errors."""


class NotSublatticeError(CrystError, ValueError):
    pass


class OrderCapExceeded(CrystError):
    """A closure grew past its order cap; the group is probably infinite."""

    def __init__(self, cap, message=None):
        self.cap = cap
        super().__init__(message or f"group order exceeds cap {cap}")


class InconsistentVectorSystem(CrystError):
    """Two words with equal linear part carry translations differing mod Z^n."""


class NotCenterless(CrystError):
    pass


class NormalizerNotFinite(CrystError):
    pass


class NonIntegralRebase(CrystError):
    """Conjugating by a lattice basis produced a non-integral linear part.

    This signals an internal bug: the lattice passed in was not invariant.
    """


class BackendMismatch(CrystError):
    pass


class MaxIterExceeded(CrystError):
    def __init__(self, history, message=None):
        self.history = list(history)
        super().__init__(message or f"no fixpoint after {len(self.history) - 1} steps")
