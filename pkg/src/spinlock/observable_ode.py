"""Linear ODE systems for the exchange-symmetric two-spin observables.

Two independent routes give the 9x9 coefficient matrix ``A`` of
``dM/dt = A M``:

* :func:`project_generator` projects a numerically built Liouvillian onto the
  observables through the Gram matrix of the product basis;
* :func:`analytic_coefficients9` is the closed-form matrix written out term by
  term.

They must agree to roundoff, which is the main consistency check of the
package.  :func:`reduce_to_locked` then extracts the closed 3-variable
subsystem in ``(Mx, W = Mzz - Myy, Mzy)`` that carries the spin-locking
physics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ClosureViolation, ReductionLeak
from .hamiltonians import Liouvillian, PhysicalParams
from .spin_algebra import ANTISYMMETRIC, OBSERVABLES, TwoSpinBasis, two_spin_basis

VARIABLES9 = ("Mz", "Mx", "My", "Mzz", "Mxx", "Myy", "Mzx", "Mzy", "Mxy")
VARIABLES3 = ("Mx", "W", "Mzy")

CLOSURE_TOL = 1e-10
REDUCTION_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoefficientMatrix9:
    """``dM/dt = matrix @ M`` over :data:`VARIABLES9` (units 1/s)."""

    matrix: np.ndarray = field(repr=False)
    params: PhysicalParams

    def __post_init__(self):
        m = _readonly(self.matrix)
        if m.shape != (9, 9):
            raise ValueError(f"expected a 9x9 matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def entry(self, row: str, col: str) -> float:
        return float(self.matrix[VARIABLES9.index(row), VARIABLES9.index(col)])

    def row(self, name: str) -> np.ndarray:
        return self.matrix[VARIABLES9.index(name)]


@dataclass(frozen=True)
class CoefficientMatrix3:
    """``dx/dt = matrix @ x`` over :data:`VARIABLES3` (units 1/s)."""

    matrix: np.ndarray = field(repr=False)
    params: PhysicalParams

    def __post_init__(self):
        m = _readonly(self.matrix)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def entry(self, row: str, col: str) -> float:
        return float(self.matrix[VARIABLES3.index(row), VARIABLES3.index(col)])


def observable_dynamics(superop: np.ndarray, basis: TwoSpinBasis | None = None) -> np.ndarray:
    """Full 16x16 matrix ``K = T G^-1`` acting on basis expectation values.

    ``T[a, b] = Tr[B_a L(B_b)]`` for the superoperator ``L``; with ``m`` the
    vector of ``Tr[B_k rho]`` the dynamics read ``dm/dt = K m``.  The result is
    complex; for a Hermiticity-preserving generator its imaginary part is
    roundoff.
    """
    basis = basis or two_spin_basis()
    v = basis.vectors()
    t = v.conj().T @ superop @ v
    return t @ basis.gram_inv


def _closure_leak(k: np.ndarray, basis: TwoSpinBasis) -> float:
    sym = [basis.index(n) for n in OBSERVABLES]
    anti = [basis.index(n) for n in ANTISYMMETRIC]
    ident = basis.index("1")
    blocks = [
        k[np.ix_(sym, [ident])],
        k[np.ix_(sym, anti)],
        k[np.ix_(anti, sym)],
        k[[ident], :],
    ]
    return max(float(np.abs(b).max()) for b in blocks)


def project_generator(
    L: Liouvillian | np.ndarray, basis: TwoSpinBasis | None = None
) -> CoefficientMatrix9:
    """Project a Liouvillian onto the nine symmetric observables.

    ``L`` may also be a bare 16x16 superoperator (e.g. one of
    ``Liouvillian.parts``); the attached params are then ``None``.

    Raises
    ------
    ClosureViolation
        If the generator couples the observables to the identity or to the
        antisymmetric sector, or leaves an imaginary residue, beyond
        ``1e-10`` relative to the largest entry.
    """
    basis = basis or two_spin_basis()
    if isinstance(L, Liouvillian):
        # projection is linear; weighting exact unit projections keeps every
        # entry at its own scale
        k = sum(t.coefficient * observable_dynamics(t.unit, basis) for t in L.terms)
        params = L.params
    else:
        k = observable_dynamics(np.asarray(L), basis)
        params = None
    scale = max(1.0, float(np.abs(k).max()))
    leak = _closure_leak(k, basis)
    if leak > CLOSURE_TOL * scale:
        raise ClosureViolation(f"generator leaks {leak:.3e} out of the symmetric sector")
    imag = float(np.abs(k.imag).max())
    if imag > CLOSURE_TOL * scale:
        raise ClosureViolation(f"projection has imaginary residue {imag:.3e}")
    idx = [basis.index(n) for n in OBSERVABLES]
    return CoefficientMatrix9(matrix=k.real[np.ix_(idx, idx)], params=params)


def analytic_coefficients9(params: PhysicalParams) -> CoefficientMatrix9:
    """Closed-form coefficient matrix on resonance."""
    w1, wd, tc = params.omega1, params.omega_d, params.tau_c
    x = w1 * wd * tc
    a = np.zeros((9, 9))
    i = {name: k for k, name in enumerate(VARIABLES9)}

    def put(row, col, value):
        a[i[row], i[col]] = value

    put("Mz", "My", w1)
    put("Mz", "Mz", -w1**2 * tc)
    put("Mz", "Mzx", 3 * x)

    put("Mx", "Mx", -9 / 4 * wd**2 * tc)
    put("Mx", "Myy", -6 * x)
    put("Mx", "Mzy", -3 * wd)
    put("Mx", "Mzz", 6 * x)

    put("My", "Mxy", 3 * x)
    put("My", "My", -(w1**2 + 9 / 4 * wd**2) * tc)
    put("My", "Mz", -w1)
    put("My", "Mzx", 3 * wd)

    put("Mzz", "Mx", 3 / 4 * x)
    put("Mzz", "Myy", 2 * w1**2 * tc)
    put("Mzz", "Mzy", w1)
    put("Mzz", "Mzz", -2 * w1**2 * tc)

    # Mxx row stays zero

    put("Myy", "Mx", -3 / 4 * x)
    put("Myy", "Myy", -2 * w1**2 * tc)
    put("Myy", "Mzy", -w1)
    put("Myy", "Mzz", 2 * w1**2 * tc)

    put("Mzx", "Mxy", w1)
    put("Mzx", "My", -3 / 4 * wd)
    put("Mzx", "Mz", 3 / 4 * x)
    put("Mzx", "Mzx", -(w1**2 + 9 / 4 * wd**2) * tc)

    put("Mzy", "Mx", 3 / 4 * wd)
    put("Mzy", "Myy", 2 * w1)
    put("Mzy", "Mzy", -(4 * w1**2 + 9 / 4 * wd**2) * tc)
    put("Mzy", "Mzz", -2 * w1)

    put("Mxy", "Mxy", -w1**2 * tc)
    put("Mxy", "My", 3 / 4 * x)
    put("Mxy", "Mzx", -w1)
    return CoefficientMatrix9(matrix=a, params=params)


def analytic_coefficients3(params: PhysicalParams) -> CoefficientMatrix3:
    """Closed-form matrix of the locked subsystem over (Mx, W, Mzy)."""
    w1, wd, tc = params.omega1, params.omega_d, params.tau_c
    x = w1 * wd * tc
    a = np.array(
        [
            [-9 / 4 * wd**2 * tc, 6 * x, -3 * wd],
            [3 / 2 * x, -4 * w1**2 * tc, 2 * w1],
            [3 / 4 * wd, -2 * w1, -(4 * w1**2 + 9 / 4 * wd**2) * tc],
        ]
    )
    return CoefficientMatrix3(matrix=a, params=params)


def _reduction_maps() -> tuple[np.ndarray, np.ndarray]:
    i = {name: k for k, name in enumerate(VARIABLES9)}
    # restrict: (Mx, Mzz - Myy, Mzy) from the 9-vector
    r = np.zeros((3, 9))
    r[0, i["Mx"]] = 1
    r[1, i["Mzz"]], r[1, i["Myy"]] = 1, -1
    r[2, i["Mzy"]] = 1
    # embed: a right inverse of r on the subspace Mzz + Myy = 0
    e = np.zeros((9, 3))
    e[i["Mx"], 0] = 1
    e[i["Mzz"], 1], e[i["Myy"], 1] = 0.5, -0.5
    e[i["Mzy"], 2] = 1
    return r, e


def reduce_to_locked(system: CoefficientMatrix9) -> CoefficientMatrix3:
    """Change variables to ``(Mx, W = Mzz - Myy, Mzy)``.

    Raises
    ------
    ReductionLeak
        If the reduced variables are driven by any direction outside the
        embedded subspace (``Mzz + Myy`` or the five other observables).
    """
    r, e = _reduction_maps()
    a = system.matrix
    reduced = r @ a @ e
    leak_map = r @ a @ (np.eye(9) - e @ r)
    scale = max(1.0, float(np.abs(a).max()))
    leak = float(np.abs(leak_map).max())
    if leak > REDUCTION_TOL * scale:
        raise ReductionLeak(f"reduced variables couple outward with strength {leak:.3e}")
    return CoefficientMatrix3(matrix=reduced, params=system.params)


def restrict_to_locked(values9: np.ndarray) -> np.ndarray:
    """Map 9-observable sample(s) to ``(Mx, W, Mzy)``; works on the last axis."""
    r, _ = _reduction_maps()
    return np.asarray(values9) @ r.T


def conserved_weights(params: PhysicalParams) -> np.ndarray:
    """Left null vector ``(1, 3 omega_d / (2 omega1), 0)`` of the reduced matrix.

    ``Q = Mx + 3 omega_d / (2 omega1) * W`` is a constant of motion.  Undefined
    for ``omega1 == 0``, where W itself stays at zero instead.
    """
    if params.omega1 == 0.0:
        raise ValueError("conserved quantity is undefined for omega1 = 0")
    return np.array([1.0, 3 * params.omega_d / (2 * params.omega1), 0.0])


def mismatched_entries(
    actual: np.ndarray, expected: np.ndarray, rtol: float = 1e-10
) -> list[tuple[int, int, float, float]]:
    """Entries where ``actual`` and ``expected`` disagree.

    Nonzero expected entries are compared relatively; entries expected to be
    zero must be below ``rtol`` times the largest expected magnitude.
    """
    actual, expected = np.asarray(actual), np.asarray(expected)
    floor = rtol * max(float(np.abs(expected).max()), np.finfo(float).tiny)
    bad = []
    for (r, c), b in np.ndenumerate(expected):
        a = actual[r, c]
        tol = rtol * abs(b) if b != 0 else floor
        if not abs(a - b) <= tol:
            bad.append((r, c, float(a), float(b)))
    return bad


def format_matrix(matrix: np.ndarray) -> str:
    """Plain-text, row-major, full-precision serialization."""
    rows = [" ".join(f"{v:.17e}" for v in row) for row in np.atleast_2d(matrix)]
    return "\n".join(rows) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    return np.array([[float(v) for v in row] for row in rows])
