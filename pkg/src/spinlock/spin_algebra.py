"""Two-spin operator algebra.

Operators are plain 4x4 complex numpy arrays acting on the product space of
two spin-1/2 particles, ``I`` (first tensor factor) and ``S`` (second).  The
collective observables are kept unnormalized::

    F_a  = I_a + S_a
    F_aa = I_a S_a
    F_ab = I_a S_b + I_b S_a

so that their expectation values are directly the magnetizations and two-spin
orders used throughout the package.  Their non-uniform norms are handled by the
Gram matrix of :class:`TwoSpinBasis` instead of by renormalizing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import NonHermitianObservable

ATOL = 1e-12

#: Observable names in the order used by every 9-variable vector and matrix.
OBSERVABLES = ("Fz", "Fx", "Fy", "Fzz", "Fxx", "Fyy", "Fzx", "Fzy", "Fxy")

#: Canonical ordering of the 16-element product basis: identity, the nine
#: exchange-symmetric observables, then six exchange-antisymmetric operators.
BASIS_NAMES = (
    "1",
    "Fx", "Fy", "Fz",
    "Fzz", "Fxx", "Fyy",
    "Fzx", "Fzy", "Fxy",
    "Dx", "Dy", "Dz",
    "Azx", "Azy", "Axy",
)

SYMMETRIC = BASIS_NAMES[1:10]
ANTISYMMETRIC = BASIS_NAMES[10:]

_PAULI_HALF = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex) / 2,
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex) / 2,
    "z": np.array([[1, 0], [0, -1]], dtype=complex) / 2,
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _operators() -> Mapping[str, np.ndarray]:
    one = np.eye(2, dtype=complex)
    ops = {}
    for a, s in _PAULI_HALF.items():
        ops["I" + a] = np.kron(s, one)
        ops["S" + a] = np.kron(one, s)
    for a in "xyz":
        ops["F" + a] = ops["I" + a] + ops["S" + a]
        ops["F" + a + a] = ops["I" + a] @ ops["S" + a]
        ops["D" + a] = ops["I" + a] - ops["S" + a]
    for a, b in ("zx", "zy", "xy"):
        ops["F" + a + b] = ops["I" + a] @ ops["S" + b] + ops["I" + b] @ ops["S" + a]
        ops["A" + a + b] = ops["I" + a] @ ops["S" + b] - ops["I" + b] @ ops["S" + a]
    ops["1"] = np.eye(4, dtype=complex)
    return MappingProxyType({k: _frozen(v) for k, v in ops.items()})


def build_spin_operators() -> Mapping[str, np.ndarray]:
    """Return the single-spin and collective two-spin operators.

    Keys are ``Ix, Iy, Iz, Sx, Sy, Sz`` (single spin), ``Fx, Fy, Fz`` (total
    spin), ``Fxx, Fyy, Fzz`` (same-axis two-spin order), ``Fzx, Fzy, Fxy``
    (symmetrized mixed two-spin order), the antisymmetric partners
    ``Dx, Dy, Dz, Azx, Azy, Axy`` and the identity ``"1"``.  The returned
    mapping and its arrays are read-only.
    """
    return _operators()


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def swap_operator() -> np.ndarray:
    """Permutation operator exchanging the two tensor factors."""
    p = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            p[2 * j + i, 2 * i + j] = 1.0
    return p


def is_hermitian(op: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.allclose(op, op.conj().T, rtol=0, atol=atol))


@dataclass(frozen=True)
class TwoSpinBasis:
    """The 16-element product operator basis and its Gram matrix.

    ``gram[i, j] = Tr[B_i^dagger B_j]``.  With the chosen elements the Gram
    matrix is diagonal, but every projection goes through its inverse so the
    code does not depend on that.
    """

    names: tuple[str, ...]
    elements: tuple[np.ndarray, ...] = field(repr=False)
    gram: np.ndarray = field(repr=False)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.elements[self.index(name)]

    def __len__(self) -> int:
        return len(self.names)

    @property
    def gram_inv(self) -> np.ndarray:
        return np.linalg.inv(self.gram)

    def vectors(self) -> np.ndarray:
        """Column-stacked basis elements, shape (16, 16); column k is vec(B_k)."""
        return np.stack([b.reshape(-1, order="F") for b in self.elements], axis=1)


@lru_cache(maxsize=None)
def two_spin_basis() -> TwoSpinBasis:
    ops = build_spin_operators()
    elements = tuple(ops[n] for n in BASIS_NAMES)
    gram = np.array(
        [[np.trace(a.conj().T @ b) for b in elements] for a in elements]
    )
    if np.abs(gram.imag).max() > ATOL:
        raise RuntimeError("basis Gram matrix is not real")
    gram = gram.real.copy()
    gram.setflags(write=False)
    return TwoSpinBasis(names=BASIS_NAMES, elements=elements, gram=gram)


@dataclass(frozen=True)
class DensityState:
    """A two-spin density operator at a given time (seconds)."""

    op: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        op = np.array(self.op, dtype=complex)
        if op.shape != (4, 4):
            raise ValueError(f"density operator must be 4x4, got {op.shape}")
        op.setflags(write=False)
        object.__setattr__(self, "op", op)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.op))


def expand_in_basis(state: DensityState | np.ndarray, basis: TwoSpinBasis | None = None) -> np.ndarray:
    """Coefficients ``c`` with ``op = sum_k c_k B_k``.

    Solved as ``c = gram^-1 @ [Tr(B_k^dagger op)]_k``.  The operator must be
    Hermitian, which makes every coefficient real.
    """
    basis = basis or two_spin_basis()
    op = state.op if isinstance(state, DensityState) else np.asarray(state, dtype=complex)
    overlaps = np.array([np.trace(b.conj().T @ op) for b in basis.elements])
    c = np.linalg.solve(basis.gram, overlaps)
    if np.abs(c.imag).max() > ATOL * max(1.0, np.abs(c).max()):
        raise ValueError("expand_in_basis expects a Hermitian operator")
    return c.real


def reconstruct(coefficients: np.ndarray, basis: TwoSpinBasis | None = None) -> np.ndarray:
    basis = basis or two_spin_basis()
    return np.einsum("k,kij->ij", np.asarray(coefficients), np.array(basis.elements))


def expectation(obs: np.ndarray, state: DensityState | np.ndarray, atol: float = ATOL) -> float:
    """Return ``Tr[obs rho]`` as a real number.

    Raises
    ------
    NonHermitianObservable
        If the trace carries an imaginary part larger than ``atol``.
    """
    op = state.op if isinstance(state, DensityState) else np.asarray(state)
    value = np.trace(obs @ op)
    if abs(value.imag) > atol:
        raise NonHermitianObservable(
            f"expectation value has imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def observable_vector(state: DensityState | np.ndarray) -> np.ndarray:
    """Expectation values of the nine observables in :data:`OBSERVABLES` order."""
    ops = build_spin_operators()
    return np.array([expectation(ops[n], state) for n in OBSERVABLES])
