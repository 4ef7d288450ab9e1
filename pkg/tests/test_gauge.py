"""Gauge transforms and the frame-phase covariance laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from abring import (
    GaugeMismatchError,
    RegaugeFunction,
    RingConfig,
    WavefunctionGrid,
    WindowMismatchError,
    apply_regauge_to_state,
    connection_analytic,
    eigenfunction_byers_yang,
    eigenfunction_periodic,
    from_byers_yang,
    grid_overlap,
    holonomy_matrix,
    regauge_connection,
    regauge_holonomy,
    regauge_w,
    shift_pattern,
    to_byers_yang,
    velocity_expectation,
    velocity_expectation_grid,
    w_matrix_ordered,
)

TWO_PI = 2.0 * np.pi


def frame_connection_numeric(window, phi, eta=None, delta=1e-3, nx=4096, ring=RingConfig()):
    """Finite-difference connection rebuilt from (optionally regauged) frames.

    Independent oracle: samples the eigenframe at phi and phi +- delta,
    applies the frame phases exp(i*eta_k) evaluated at the respective
    fluxes, and differences the grid-quadrature overlaps.
    """
    ks = np.arange(window[0], window[1] + 1)

    def frame(phi_at):
        out = []
        for k in ks:
            g = eigenfunction_byers_yang(k, phi_at, ring, nx)
            if eta is not None:
                g = g.with_samples(g.samples * np.exp(1j * eta.value(int(k), phi_at)))
            out.append(g)
        return out

    bras = frame(phi)
    plus = frame(phi + delta)
    minus = frame(phi - delta)
    n = ks.size
    entries = np.empty((n, n), dtype=complex)
    for col in range(n):
        for row in range(n):
            entries[row, col] = (
                1j * (grid_overlap(bras[row], plus[col]) - grid_overlap(bras[row], minus[col]))
                / (2.0 * delta)
            )
    return entries


class TestByersYangTransform:
    def test_zero_flux_is_identity(self, ring):
        psi = eigenfunction_periodic(2, nx=128)
        out = to_byers_yang(psi, 0.0, ring)
        assert_allclose(out.samples, psi.samples, atol=1e-15)
        assert out.gauge == "byers-yang"

    def test_builds_transport_fixed_eigenfunction(self, ring):
        # exp(i*pi*phi) * (periodic mode k), transformed at flux phi, is
        # exactly the transport-fixed twisted-gauge eigenfunction.
        k, phi = 3, 0.4
        base = eigenfunction_periodic(k, ring, nx=256)
        dressed = base.with_samples(base.samples * np.exp(1j * np.pi * phi))
        out = to_byers_yang(dressed, phi, ring)
        assert_allclose(out.samples, eigenfunction_byers_yang(k, phi, ring, 256).samples, atol=1e-12)

    def test_inverse_maps_back_with_transport_phase(self, ring):
        # twisted eigenfunction -> exp(i*pi*phi) * periodic mode
        k, phi = -2, 0.7
        out = from_byers_yang(eigenfunction_byers_yang(k, phi, ring, 128), phi, ring)
        expected = np.exp(1j * np.pi * phi) * eigenfunction_periodic(k, ring, 128).samples
        assert_allclose(out.samples, expected, atol=1e-12)

    @given(k=st.integers(-6, 6), phi=st.floats(-1.5, 1.5, allow_nan=False))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_identity(self, k, phi):
        ring = RingConfig()
        psi = eigenfunction_periodic(k, ring, nx=64)
        back = from_byers_yang(to_byers_yang(psi, phi, ring), phi, ring)
        assert np.max(np.abs(back.samples - psi.samples)) < 1e-14
        assert abs(back.norm() - 1.0) < 1e-14

    def test_wrong_gauge_rejected(self, ring):
        twisted = eigenfunction_byers_yang(0, 0.2, ring, 64)
        with pytest.raises(GaugeMismatchError):
            to_byers_yang(twisted, 0.2, ring)
        periodic = eigenfunction_periodic(0, ring, 64)
        with pytest.raises(GaugeMismatchError):
            from_byers_yang(periodic, 0.2, ring)

    def test_norm_preserved(self, ring):
        psi = eigenfunction_periodic(4, ring, nx=512)
        assert abs(to_byers_yang(psi, 0.63, ring).norm() - 1.0) < 1e-14


class TestVelocityGaugeCovariance:
    @pytest.mark.parametrize("k,phi", [(0, 0.0), (1, 0.25), (-3, 0.8), (5, 1.4)])
    def test_twisted_eigenfunction(self, k, phi, ring):
        psi = eigenfunction_byers_yang(k, phi, ring, 512)
        assert_allclose(velocity_expectation_grid(psi), velocity_expectation(k, phi, ring), atol=1e-10)

    def test_periodic_eigenfunction(self, ring):
        psi = eigenfunction_periodic(2, ring, 512, phi=0.3)
        assert_allclose(velocity_expectation_grid(psi), velocity_expectation(2, 0.3, ring), atol=1e-10)

    def test_transform_does_not_change_velocity(self, ring):
        psi = eigenfunction_periodic(2, ring, 512, phi=0.3)
        twisted = to_byers_yang(psi, 0.3, ring)
        assert_allclose(
            velocity_expectation_grid(twisted), velocity_expectation_grid(psi), atol=1e-10
        )


class TestRegaugeFunction:
    def test_derivative_matches_finite_differences(self, rng):
        eta = RegaugeFunction.random_smooth((-3, 3), rng)
        h = 1e-6
        for k in range(-3, 4):
            for phi in (0.0, 0.4, 1.0):
                fd = (eta.value(k, phi + h) - eta.value(k, phi - h)) / (2.0 * h)
                assert_allclose(eta.derivative(k, phi), fd, rtol=1e-8, atol=1e-8)

    def test_window_checking(self, rng):
        eta = RegaugeFunction.random_smooth((-2, 2), rng)
        conn = connection_analytic((-5, 5))
        with pytest.raises(WindowMismatchError):
            regauge_connection(conn, eta, 0.0)

    def test_state_regauge_is_a_phase(self, ring):
        psi = eigenfunction_byers_yang(1, 0.3, ring, 64)
        out = apply_regauge_to_state(psi, RegaugeFunction.constant(0.7), 1)
        assert_allclose(out.samples, psi.samples * np.exp(0.7j), atol=1e-15)


class TestRegaugeConnection:
    def test_zero_eta_identity(self):
        conn = connection_analytic((-4, 4))
        out = regauge_connection(conn, RegaugeFunction.zero(), 0.3)
        assert_allclose(out.entries, conn.entries, atol=1e-15)

    def test_constant_eta_identity(self):
        # mode-independent constant phases cancel entirely
        conn = connection_analytic((-4, 4))
        out = regauge_connection(conn, RegaugeFunction.constant(1.3), 0.3)
        assert_allclose(out.entries, conn.entries, atol=1e-15)

    def test_linear_eta_shifts_diagonal(self):
        conn = connection_analytic((-4, 4))
        out = regauge_connection(conn, RegaugeFunction.linear(np.pi), 0.3)
        assert_allclose(np.diag(out.entries), np.full(9, -np.pi), atol=1e-15)
        off = out.entries - np.diag(np.diag(out.entries))
        assert_allclose(off, conn.entries, atol=1e-15)

    def test_linear_eta_against_frame_oracle(self):
        # compare with the connection rebuilt from regauged frames by
        # finite differences; the quadratic coefficient is ~pi^3/6 here,
        # so delta = 2.5e-4 brings the oracle itself below 1e-6
        win = (-3, 3)
        eta = RegaugeFunction.linear(np.pi)
        law = regauge_connection(connection_analytic(win), eta, 0.2)
        oracle = frame_connection_numeric(win, 0.2, eta=eta, delta=2.5e-4, nx=8192)
        assert np.max(np.abs(law.entries - oracle)) < 1e-6

    def test_random_eta_against_frame_oracle(self, rng):
        win = (-2, 2)
        eta = RegaugeFunction.random_smooth(win, rng)
        law = regauge_connection(connection_analytic(win), eta, 0.4)
        oracle = frame_connection_numeric(win, 0.4, eta=eta, delta=1e-3, nx=4096)
        assert np.max(np.abs(law.entries - oracle)) < 1e-5

    def test_hermiticity_preserved(self, rng):
        eta = RegaugeFunction.random_smooth((-4, 4), rng)
        out = regauge_connection(connection_analytic((-4, 4)), eta, 0.7)
        assert out.hermiticity_defect() < 1e-14


class TestRegaugeTransport:
    def test_zero_eta_identity(self):
        w = w_matrix_ordered((-3, 3), 0.0, 1.0, steps=1)
        out = regauge_w(w, RegaugeFunction.zero(), 0.0, 1.0)
        assert_allclose(out.entries, w.entries, atol=1e-15)

    def test_constant_eta_preserves_moduli(self):
        w = w_matrix_ordered((-3, 3), 0.0, 0.7, steps=1)
        out = regauge_w(w, RegaugeFunction.constant(0.9), 0.0, 0.7)
        assert_allclose(np.abs(out.entries), np.abs(w.entries), atol=1e-15)

    def test_law_matches_ordered_product_of_regauged_connection(self, rng):
        win = (-3, 3)
        eta = RegaugeFunction.random_smooth(win, rng)
        w_exact = w_matrix_ordered(win, 0.0, 1.0, steps=1)
        law = regauge_w(w_exact, eta, 0.0, 1.0)
        provider = lambda phi: regauge_connection(connection_analytic(win, phi), eta, phi)
        rebuilt = w_matrix_ordered(win, 0.0, 1.0, steps=800, conn=provider)
        assert np.max(np.abs(rebuilt.entries - law.entries)) < 1e-6

    def test_unitarity_preserved(self, rng):
        eta = RegaugeFunction.random_smooth((-3, 3), rng)
        w = w_matrix_ordered((-3, 3), 0.0, 1.0, steps=1)
        out = regauge_w(w, eta, 0.0, 1.0)
        assert out.unitarity_defect() < 1e-12


class TestRegaugeHolonomy:
    def test_zero_eta_identity(self):
        m = holonomy_matrix((-4, 4), phi_start=0.0, nx=512)
        out = regauge_holonomy(m, RegaugeFunction.zero(), 0.0)
        assert_allclose(out.entries, m.entries, atol=1e-15)

    def test_moduli_invariant(self, rng):
        m = holonomy_matrix((-4, 4), phi_start=0.2, nx=512)
        eta = RegaugeFunction.random_smooth((-4, 4), rng)
        out = regauge_holonomy(m, eta, 0.2)
        assert_allclose(np.abs(out.entries), np.abs(m.entries), atol=1e-14)

    def test_permutation_structure_survives_up_to_phases(self, rng):
        m = holonomy_matrix((-4, 4), phi_start=0.0, nx=512)
        eta = RegaugeFunction.random_smooth((-4, 4), rng)
        out = regauge_holonomy(m, eta, 0.0)
        pattern = np.abs(shift_pattern(m.k_values))
        assert_allclose(np.abs(out.entries), pattern, atol=1e-12)

    def test_law_matches_regauged_frame_overlaps(self, rng):
        # compute the holonomy directly in the regauged frame: bras pick up
        # eta at phi', kets inherit the initial frame phase (also at phi')
        win = (-3, 3)
        nx, phi0 = 1024, 0.1
        eta = RegaugeFunction.random_smooth(win, rng)
        m = holonomy_matrix(win, phi_start=phi0, nx=nx)
        law = regauge_holonomy(m, eta, phi0)
        ks = m.k_values
        entries = np.empty_like(law.entries)
        for j, k_in in enumerate(ks):
            cycled = eigenfunction_byers_yang(k_in, phi0 + 1.0, nx=nx)
            cycled = cycled.with_samples(
                cycled.samples * np.exp(-1j * np.pi) * np.exp(1j * eta.value(int(k_in), phi0))
            )
            for i, k_out in enumerate(ks):
                bra = eigenfunction_byers_yang(k_out, phi0, nx=nx)
                bra = bra.with_samples(bra.samples * np.exp(1j * eta.value(int(k_out), phi0)))
                entries[i, j] = grid_overlap(bra, cycled)
        assert np.max(np.abs(entries - law.entries)) < 1e-12
