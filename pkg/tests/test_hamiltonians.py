import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinlock.errors import InvalidM0, UnsupportedOffResonance
from spinlock.hamiltonians import (
    LIOUVILLIAN_PARTS,
    Geometry,
    PhysicalParams,
    build_liouvillian,
    drive_rotating,
    omega_d_from_geometry,
    secular_dipolar,
    validate_regime,
    vec,
    unvec,
)
from spinlock.observable_ode import observable_dynamics, project_generator
from spinlock.spin_algebra import ANTISYMMETRIC, OBSERVABLES, build_spin_operators, commutator, two_spin_basis

from conftest import TWO_PI, oracle_generator, oracle_hamiltonian

ops = build_spin_operators()

omegas = st.floats(-3e4, 3e4, allow_nan=False)
taus = st.floats(0, 3e-6)


class TestParams:
    def test_validation(self):
        with pytest.raises(InvalidM0):
            PhysicalParams(1.0, 1.0, 1e-6, m0=0.0)
        with pytest.raises(InvalidM0):
            PhysicalParams(1.0, 1.0, 1e-6, m0=1.5)
        with pytest.raises(ValueError):
            PhysicalParams(1.0, 1.0, -1e-6)
        with pytest.raises(ValueError):
            PhysicalParams(float("nan"), 1.0, 1e-6)

    def test_signed_frequencies_accepted(self):
        p = PhysicalParams(-1.0, -2.0, 1e-6)
        assert p.omega_d == -2.0


class TestHamiltonians:
    def test_zero_strengths_give_zero(self):
        p = PhysicalParams(0.0, 0.0, 1e-6)
        assert not secular_dipolar(p).any()
        assert not drive_rotating(p).any()

    def test_dipolar_matrix_element(self):
        p = PhysicalParams(0.0, 7.0, 1e-6)
        # |uu> is the first product state; 2 Iz Sz contributes 2 * 1/4
        assert secular_dipolar(p)[0, 0] == pytest.approx(3.5)

    def test_drive_matrix_element(self):
        p = PhysicalParams(3.0, 0.0, 1e-6)
        # <uu| Sx |ud> = 1/2
        assert drive_rotating(p)[0, 1] == pytest.approx(1.5)
        np.testing.assert_array_equal(drive_rotating(p), 3.0 * ops["Fx"])

    def test_hermitian_and_commutes_with_fz(self):
        p = PhysicalParams(2.0, -5.0, 1e-6)
        h = secular_dipolar(p)
        np.testing.assert_allclose(h, h.conj().T, atol=1e-14)
        np.testing.assert_allclose(commutator(h, ops["Fz"]), 0, atol=1e-14)

    def test_off_resonance_rejected(self):
        p = PhysicalParams(1.0, 1.0, 1e-6, delta_omega=10.0)
        with pytest.raises(UnsupportedOffResonance):
            drive_rotating(p)
        with pytest.raises(UnsupportedOffResonance):
            build_liouvillian(p)


class TestGeometry:
    def test_magic_angle(self):
        geo = Geometry(gamma=2.0, r=1.0, theta=math.acos(1 / math.sqrt(3)))
        assert omega_d_from_geometry(geo) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("theta,factor", [(0.0, 0.63078313), (math.pi / 2, -0.31539157)])
    def test_y20_values(self, theta, factor):
        geo = Geometry(gamma=3.0, r=2.0, theta=theta, phi=1.3)
        assert omega_d_from_geometry(geo) == pytest.approx(9 / 8 * factor, rel=1e-7)

    def test_y20_matches_scipy(self):
        from scipy.special import sph_harm_y

        for theta in np.linspace(0, math.pi, 7):
            geo = Geometry(gamma=1.0, r=1.0, theta=theta, phi=0.4)
            assert omega_d_from_geometry(geo) == pytest.approx(sph_harm_y(2, 0, theta, 0.4).real, abs=1e-14)

    def test_invalid_geometry(self):
        with pytest.raises(ValueError):
            Geometry(1.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            Geometry(1.0, 1.0, 4.0)


class TestLiouvillian:
    def test_zero_params_zero_generator(self):
        assert not build_liouvillian(PhysicalParams(0.0, 0.0, 1e-6)).matrix.any()

    def test_annihilates_identity(self, fig2_params):
        L = build_liouvillian(fig2_params)
        np.testing.assert_allclose(L.apply(np.eye(4) / 4), 0, atol=1e-12)

    def test_vec_roundtrip(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        np.testing.assert_array_equal(unvec(vec(m)), m)

    @settings(max_examples=40, deadline=None)
    @given(omegas, omegas, taus)
    def test_matches_direct_double_commutator(self, w1, wd, tau):
        L = build_liouvillian(PhysicalParams(w1, wd, tau))
        oracle = oracle_generator(oracle_hamiltonian(w1, wd), tau)
        scale = max(1.0, (abs(w1) + abs(wd)) * (1 + (abs(w1) + abs(wd)) * tau))
        for b in two_spin_basis().elements:
            assert np.abs(L.apply(b) - oracle(b)).max() < 1e-12 * scale

    @settings(max_examples=40, deadline=None)
    @given(omegas, omegas, taus)
    def test_parts_sum_to_matrix(self, w1, wd, tau):
        L = build_liouvillian(PhysicalParams(w1, wd, tau))
        parts = L.parts
        assert set(parts) == set(LIOUVILLIAN_PARTS)
        total = sum(parts[k] for k in LIOUVILLIAN_PARTS)
        scale = max(1.0, np.abs(L.matrix).max())
        assert np.abs(total - L.matrix).max() <= 1e-14 * scale
        # second-order parts sum to -tau ad_H^2
        h = oracle_hamiltonian(w1, wd)
        ad = np.kron(np.eye(4), h) - np.kron(h.T, np.eye(4))
        second = total - parts["first_order"]
        assert np.abs(second + tau * ad @ ad).max() <= 1e-13 * max(1.0, np.abs(tau * ad @ ad).max())

    @settings(max_examples=40, deadline=None)
    @given(omegas, omegas, taus)
    def test_trace_and_hermiticity_preserving(self, w1, wd, tau):
        L = build_liouvillian(PhysicalParams(w1, wd, tau))
        scale = max(1.0, np.abs(L.matrix).max())
        basis = two_spin_basis()
        rng = np.random.default_rng(0)
        for b in basis.elements:
            out = L.apply(b)
            assert abs(np.trace(out)) < 1e-12 * scale
        for _ in range(4):
            x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            lhs = L.apply(x.conj().T)
            rhs = L.apply(x).conj().T
            assert np.abs(lhs - rhs).max() < 1e-12 * scale * 10

    def test_exchange_symmetric_closure(self, rng):
        basis = two_spin_basis()
        sym = [basis.index(n) for n in ("1",) + OBSERVABLES]
        anti = [basis.index(n) for n in ANTISYMMETRIC]
        for _ in range(20):
            p = PhysicalParams(rng.uniform(-3e4, 3e4), rng.uniform(-3e4, 3e4), rng.uniform(0, 3e-6))
            L = build_liouvillian(p)
            # coordinates of L(B_j) in the basis
            coords = basis.gram_inv @ (basis.vectors().conj().T @ L.matrix @ basis.vectors())
            scale = np.abs(coords).max()
            assert np.abs(coords[np.ix_(anti, sym)]).max() < 1e-12 * scale
            assert np.abs(coords[np.ix_(sym, anti)]).max() < 1e-12 * scale

    def test_self_terms_dissipative_cross_terms_off_diagonal(self, rng):
        for _ in range(20):
            p = PhysicalParams(rng.uniform(0, 3e4), rng.uniform(-3e4, 3e4), rng.uniform(1e-7, 3e-6))
            L = build_liouvillian(p)
            for name in ("drive_drive", "dipole_dipole"):
                d = np.diag(project_generator(L.parts[name]).matrix)
                assert d.max() <= 1e-12 * max(1.0, np.abs(d).max())
            cross = project_generator(L.cross_terms).matrix
            assert np.abs(np.diag(cross)).max() <= 1e-12 * max(1.0, np.abs(cross).max())

    def test_cross_term_mz_from_mzx(self, fig2_params):
        """Brute-force trace: Tr[Fz X(Fzx)] / Tr[Fzx^2] for the drive-dipole cross terms."""
        p = fig2_params
        hs = p.omega1 * ops["Fx"]
        hd = secular_dipolar(p)
        c = commutator

        def cross(rho):
            return -p.tau_c * (c(hs, c(hd, rho)) + c(hd, c(hs, rho)))

        fzx = ops["Fzx"]
        oracle = (np.trace(ops["Fz"] @ cross(fzx)) / np.trace(fzx @ fzx)).real
        assert oracle == pytest.approx(3 * p.omega1 * p.omega_d * p.tau_c, rel=1e-12)
        projected = project_generator(build_liouvillian(p).cross_terms).matrix
        from spinlock.observable_ode import VARIABLES9

        got = projected[VARIABLES9.index("Mz"), VARIABLES9.index("Mzx")]
        assert got == pytest.approx(oracle, rel=1e-12)


class TestRegime:
    def test_reference_parameters_clean(self):
        p = PhysicalParams(TWO_PI * 2000, TWO_PI * 5000, 1e-6)
        assert validate_regime(p) == []

    def test_long_correlation_time_warns(self):
        p = PhysicalParams(0.0, TWO_PI * 5000, 1e-3)
        warnings = validate_regime(p)
        assert len(warnings) == 1 and "omega_d*tau_c" in warnings[0]

    def test_no_drive_no_drive_warnings(self):
        p = PhysicalParams(0.0, TWO_PI * 5000, 1e-6, omega0=1.0)
        assert validate_regime(p) == []

    def test_larmor_conditions(self):
        p = PhysicalParams(TWO_PI * 2000, TWO_PI * 5000, 1e-6, omega0=TWO_PI * 1e6)
        # 2 omega0 tau_c ~ 12.6 passes, omega1^2 ~ 1.6e8 exceeds omega0 / 10
        w = validate_regime(p)
        assert len(w) == 1 and "omega1**2" in w[0]
        p = PhysicalParams(TWO_PI * 2000, TWO_PI * 5000, 1e-6, omega0=1e3)
        assert len(validate_regime(p)) == 2

    def test_off_resonance_warns_without_raising(self):
        assert validate_regime(PhysicalParams(1.0, 1.0, 1e-6, delta_omega=1.0))
