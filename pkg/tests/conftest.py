import numpy as np
import pytest

from spinlock.hamiltonians import PhysicalParams

TWO_PI = 2 * np.pi
OMEGA_D = TWO_PI * 5000
TAU_C = 1e-6


@pytest.fixture
def fig2_params():
    return PhysicalParams(omega1=TWO_PI * 2000, omega_d=OMEGA_D, tau_c=TAU_C, m0=1.0)


@pytest.fixture
def fig1_params():
    return PhysicalParams(omega1=0.0, omega_d=OMEGA_D, tau_c=TAU_C, m0=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Independent oracle: operators written out from Pauli matrices, no package code.
SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
E2 = np.eye(2)
PAULI = {"x": SX, "y": SY, "z": SZ}


def I_(a):
    return np.kron(PAULI[a], E2)


def S_(a):
    return np.kron(E2, PAULI[a])


def oracle_observables():
    f = {a: I_(a) + S_(a) for a in "xyz"}
    for a in "xyz":
        f[a + a] = I_(a) @ S_(a)
    for a, b in ("zx", "zy", "xy"):
        f[a + b] = I_(a) @ S_(b) + I_(b) @ S_(a)
    return f


def oracle_hamiltonian(w1, wd):
    return w1 * (I_("x") + S_("x")) + wd * (
        2 * I_("z") @ S_("z") - I_("x") @ S_("x") - I_("y") @ S_("y")
    )


def oracle_generator(h, tau_c):
    """rho -> -i[H, rho] - tau_c [H, [H, rho]] as a plain function."""

    def c(a, b):
        return a @ b - b @ a

    return lambda rho: -1j * c(h, rho) - tau_c * c(h, c(h, rho))
