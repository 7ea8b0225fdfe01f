"""Spin-locking in dipolar-coupled spin pairs under a fluctuation-regulated master equation.

The package builds the rotating-frame generator for two spin-1/2 particles
with a resonant drive and secular dipolar coupling, projects it onto the nine
exchange-symmetric observables, integrates the resulting dynamics and
analyses the spin-locked steady state.
"""

from .analysis import (
    SteadyState,
    SweepResult,
    lock_time,
    steady_state_closed_form,
    steady_state_long_time,
    steady_state_mx,
    steady_state_nullspace,
    sweep,
)
from .errors import (
    ClosureViolation,
    DegenerateParams,
    DuplicateGridPoint,
    InvalidM0,
    NeverLocks,
    NonFiniteState,
    NonHermitianObservable,
    RankError,
    ReductionLeak,
    SpinlockError,
    StepSizeUnderflow,
    UnsupportedOffResonance,
)
from .hamiltonians import (
    Geometry,
    Liouvillian,
    PhysicalParams,
    build_liouvillian,
    drive_rotating,
    omega_d_from_geometry,
    secular_dipolar,
    validate_regime,
)
from .integrator import (
    InitialCondition,
    Trajectory,
    initial_density,
    integrate,
    steady_state_detect,
)
from .observable_ode import (
    CoefficientMatrix3,
    CoefficientMatrix9,
    analytic_coefficients3,
    analytic_coefficients9,
    project_generator,
    reduce_to_locked,
)
from .spin_algebra import (
    DensityState,
    TwoSpinBasis,
    build_spin_operators,
    commutator,
    expand_in_basis,
    expectation,
    two_spin_basis,
)

__version__ = "0.1.0"
