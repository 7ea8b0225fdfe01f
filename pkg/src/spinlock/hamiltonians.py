"""Rotating-frame Hamiltonians and the second-order master-equation generator.

On resonance both the co-rotating drive ``omega1 * Fx`` and the secular
dipolar coupling are static in the interaction frame.  The exponentially
regulated memory integral then reduces to a factor ``tau_c`` and the
generator becomes::

    L(rho) = -i [H, rho] - tau_c [H, [H, rho]],    H = H_drive + H_dip

The second-order piece is kept split into its four drive/dipole products so
self-terms (relaxation) and cross-terms (non-dissipative coupling) can be
inspected separately.

Superoperators act on column-stacked vectors: ``vec(A X B) = (B.T kron A) vec(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .errors import InvalidM0, UnsupportedOffResonance
from .spin_algebra import build_spin_operators

LIOUVILLIAN_PARTS = (
    "first_order",
    "drive_drive",
    "drive_dipole",
    "dipole_drive",
    "dipole_dipole",
)

# perturbative second-order validity threshold on omega * tau_c
REGIME_LIMIT = 0.1


@dataclass(frozen=True)
class PhysicalParams:
    """Scalar inputs of the two-spin model.

    Parameters
    ----------
    omega1 : float
        Drive amplitude (rad/s).  Signed values are accepted.
    omega_d : float
        Dipolar coupling strength (rad/s).  May be negative, as produced by
        :func:`omega_d_from_geometry`.
    tau_c : float
        Correlation time of the environment fluctuations (s).  Zero switches
        the second-order terms off.
    m0 : float
        Equilibrium magnetization, ``0 < m0 <= 1``.
    delta_omega : float
        Drive offset from resonance (rad/s).  Operations that build the
        generator reject anything but zero.
    omega0 : float, optional
        Larmor frequency (rad/s), only consulted by :func:`validate_regime`.
    """

    omega1: float
    omega_d: float
    tau_c: float
    m0: float = 1.0
    delta_omega: float = 0.0
    omega0: Optional[float] = None

    def __post_init__(self):
        for name in ("omega1", "omega_d", "tau_c", "m0", "delta_omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.omega0 is not None:
            object.__setattr__(self, "omega0", float(self.omega0))
        if self.tau_c < 0:
            raise ValueError(f"tau_c must be nonnegative, got {self.tau_c}")
        if not 0 < self.m0 <= 1:
            raise InvalidM0(f"m0 must lie in (0, 1], got {self.m0}")

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Geometry:
    """Orientation of the internuclear vector.

    ``gamma`` and ``r`` enter only through ``gamma**2 / r**3``; physical
    constants (hbar, mu0 / 4 pi) are assumed absorbed so that this ratio is a
    frequency in rad/s.
    """

    gamma: float
    r: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not 0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


def _require_on_resonance(params: PhysicalParams) -> None:
    if params.delta_omega != 0.0:
        raise UnsupportedOffResonance(
            f"delta_omega = {params.delta_omega} rad/s; only on-resonance "
            "dynamics are supported"
        )


def secular_dipolar(params: PhysicalParams) -> np.ndarray:
    """``omega_d (2 Iz Sz - Ix Sx - Iy Sy)`` in rad/s."""
    ops = build_spin_operators()
    return params.omega_d * (
        2 * ops["Iz"] @ ops["Sz"] - ops["Ix"] @ ops["Sx"] - ops["Iy"] @ ops["Sy"]
    )


def drive_rotating(params: PhysicalParams) -> np.ndarray:
    """Co-rotating drive along x in the rotating frame, ``omega1 Fx``."""
    _require_on_resonance(params)
    return params.omega1 * np.array(build_spin_operators()["Fx"])


def y20(theta: float, phi: float = 0.0) -> float:
    """Orthonormalized spherical harmonic Y_2^0 (real; independent of phi)."""
    return math.sqrt(5 / (16 * math.pi)) * (3 * math.cos(theta) ** 2 - 1)


def omega_d_from_geometry(geo: Geometry) -> float:
    """Dipolar strength ``gamma**2 / r**3 * Y20(theta, phi)``; the sign is kept."""
    return geo.gamma**2 / geo.r**3 * y20(geo.theta, geo.phi)


def left_superop(a: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(a.shape[0]), a)


def right_superop(a: np.ndarray) -> np.ndarray:
    return np.kron(a.T, np.eye(a.shape[0]))


def adjoint_superop(h: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> [h, X]`` on column-stacked vectors."""
    return left_superop(h) - right_superop(h)


def vec(op: np.ndarray) -> np.ndarray:
    return np.asarray(op).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int = 4) -> np.ndarray:
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True)
class LiouvillianTerm:
    """One scalar-weighted piece ``coefficient * unit`` of a generator."""

    part: str
    coefficient: complex
    unit: np.ndarray = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return self.coefficient * self.unit


@dataclass(frozen=True)
class Liouvillian:
    """Generator of the reduced two-spin dynamics as a 16x16 superoperator.

    Stored as a list of terms ``coefficient * unit`` where each ``unit`` is
    built from the unit-strength drive ``Fx`` and dipolar operator
    ``2 Iz Sz - Ix Sx - Iy Sy``.  The unit superoperators have binary-fraction
    entries, so keeping the physical scale in a separate scalar lets
    projections resolve entries of very different magnitude without
    cancellation error.  ``matrix`` is the plain sum.
    """

    terms: tuple[LiouvillianTerm, ...] = field(repr=False)
    params: PhysicalParams

    @property
    def matrix(self) -> np.ndarray:
        return sum(t.matrix for t in self.terms)

    @property
    def parts(self) -> Mapping[str, np.ndarray]:
        """The generator split into :data:`LIOUVILLIAN_PARTS`."""
        out = {name: np.zeros((16, 16), dtype=complex) for name in LIOUVILLIAN_PARTS}
        for t in self.terms:
            out[t.part] = out[t.part] + t.matrix
        return out

    def apply(self, op: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(op))

    @property
    def cross_terms(self) -> np.ndarray:
        parts = self.parts
        return parts["drive_dipole"] + parts["dipole_drive"]

    @property
    def self_terms(self) -> np.ndarray:
        parts = self.parts
        return parts["drive_drive"] + parts["dipole_dipole"]


def _unit_adjoints() -> tuple[np.ndarray, np.ndarray]:
    unit = PhysicalParams(omega1=1.0, omega_d=1.0, tau_c=0.0)
    return (
        adjoint_superop(drive_rotating(unit)),
        adjoint_superop(secular_dipolar(unit)),
    )


def build_liouvillian(params: PhysicalParams) -> Liouvillian:
    """Assemble ``L = -i ad_H - tau_c ad_H^2`` from drive and secular dipolar terms.

    The second-order part is built term by term as ``-tau_c ad_A ad_B`` for
    ``(A, B)`` in (drive, drive), (drive, dipole), (dipole, drive),
    (dipole, dipole).
    """
    _require_on_resonance(params)
    ad_x, ad_d = _unit_adjoints()
    w1, wd, tau = params.omega1, params.omega_d, params.tau_c
    parts = [
        ("first_order", -1j * w1, ad_x),
        ("first_order", -1j * wd, ad_d),
        ("drive_drive", -tau * w1 * w1, ad_x @ ad_x),
        ("drive_dipole", -tau * w1 * wd, ad_x @ ad_d),
        ("dipole_drive", -tau * wd * w1, ad_d @ ad_x),
        ("dipole_dipole", -tau * wd * wd, ad_d @ ad_d),
    ]
    terms = []
    for part, coef, unit in parts:
        unit = np.array(unit)
        unit.setflags(write=False)
        terms.append(LiouvillianTerm(part, complex(coef), unit))
    return Liouvillian(terms=tuple(terms), params=params)


def validate_regime(params: PhysicalParams) -> list[str]:
    """Human-readable warnings about the model's validity conditions.

    Checked: ``omega1 * tau_c`` and ``omega_d * tau_c`` below 0.1 (second-order
    truncation), and, when ``omega0`` is given, the two conditions quoted for
    dropping the counter-rotating drive, ``2 omega0 tau_c >> 1`` and
    ``omega1**2 << omega0``.  The latter compares quantities of different
    dimension; it is evaluated literally on the rad/s values.  "Much greater"
    is taken as a factor of 10.  Never raises.
    """
    warnings = []
    w1t = abs(params.omega1) * params.tau_c
    wdt = abs(params.omega_d) * params.tau_c
    if w1t >= REGIME_LIMIT:
        warnings.append(
            f"omega1*tau_c = {w1t:.3g} >= {REGIME_LIMIT}: second-order truncation is unreliable"
        )
    if wdt >= REGIME_LIMIT:
        warnings.append(
            f"omega_d*tau_c = {wdt:.3g} >= {REGIME_LIMIT}: second-order truncation is unreliable"
        )
    if params.delta_omega != 0.0:
        warnings.append("delta_omega != 0: off-resonance dynamics are not modelled")
    if params.omega0 is not None and params.omega1 != 0.0:
        if 2 * params.omega0 * params.tau_c < 10:
            warnings.append(
                f"2*omega0*tau_c = {2 * params.omega0 * params.tau_c:.3g} is not >> 1: "
                "counter-rotating drive terms may matter"
            )
        if params.omega1**2 >= params.omega0 / 10:
            warnings.append(
                f"omega1**2 = {params.omega1**2:.3g} is not << omega0 = {params.omega0:.3g}: "
                "counter-rotating drive terms may matter"
            )
    return warnings
