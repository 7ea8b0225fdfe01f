"""Exception types raised by the spinlock package."""


class SpinlockError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianObservable(SpinlockError, ValueError):
    pass


class UnsupportedOffResonance(SpinlockError, ValueError):
    """Raised when a nonzero drive offset is requested; only on-resonance is modelled."""


class ClosureViolation(SpinlockError):
    """The generator leaks out of the exchange-symmetric observable sector."""


class ReductionLeak(SpinlockError):
    """The (Mx, Mzz - Myy, Mzy) subsystem couples to variables outside it."""


class InvalidM0(SpinlockError, ValueError):
    pass


class StepSizeUnderflow(SpinlockError):
    pass


class NonFiniteState(SpinlockError):
    pass


class DegenerateParams(SpinlockError, ValueError):
    """Both omega1 and omega_d vanish, so there is no relaxation to a locked state."""


class RankError(SpinlockError):
    pass


class NeverLocks(SpinlockError):
    pass


class DuplicateGridPoint(SpinlockError, ValueError):
    pass
