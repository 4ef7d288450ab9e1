"""Acceptance suite: one test per criterion, printed pass/fail lines.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Tolerances are frozen here; the transport-truncation bound
(criterion 4) was frozen after measuring the error curve, recorded in
docs/w_truncation.md:

    window 101 -> 5.404e-3, 201 -> 2.579e-3, 401 -> 1.261e-3, 801 -> 6.24e-4
"""

import time

import numpy as np
import pytest
from scipy.integrate import simpson

from abring import (
    BYERS_YANG,
    PERIODIC,
    FluxSchedule,
    GridSolverConfig,
    RegaugeFunction,
    RingConfig,
    cn_evolve_by,
    cn_evolve_periodic,
    connection_analytic,
    connection_numeric,
    corrected_eigenenergy,
    eigenbasis_overlaps,
    eigenenergy,
    eigenfunction_byers_yang,
    geometric_holonomy,
    grid_overlap,
    holonomy_matrix,
    periodic_gauge_connection,
    phase_decompose,
    regauge_connection,
    regauge_holonomy,
    regauge_w,
    shift_pattern,
    to_byers_yang,
    velocity_expectation,
    w_matrix_closed_block,
    w_matrix_ordered,
)

RING = RingConfig()


def unit_cycle(duration):
    return FluxSchedule(phi_start=0.0, phi_end=1.0, duration=duration)


def report(number, name, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {number} ({name}): {status} -- {detail} [{elapsed:.2f}s]")
    assert ok, f"criterion {number} ({name}): {detail}"
    assert elapsed < budget, f"criterion {number} exceeded runtime budget: {elapsed:.2f}s >= {budget}s"


def test_criterion_1_eigenvalue_anholonomy():
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(-10, 11):
        for phi in np.arange(0.0, 1.0, 0.1):
            lhs = eigenenergy(k, phi + 1.0, RING)
            rhs = eigenenergy(k - 1, phi, RING)
            rel = abs(lhs - rhs) / max(1.0, abs(rhs))
            worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    report(1, "eigenvalue-anholonomy", worst <= 1e-15, f"max scaled residual {worst:.3e}", elapsed, 1.0)


def test_criterion_2_holonomy_permutation():
    t0 = time.perf_counter()
    m = holonomy_matrix((-10, 10), phi_start=0.0, nx=4096, ring=RING)
    deviation = float(np.max(np.abs(m.entries - shift_pattern(m.k_values))))
    elapsed = time.perf_counter() - t0
    report(2, "holonomy-permutation", deviation <= 1e-10, f"max deviation {deviation:.3e}", elapsed, 10.0)


def test_criterion_3_analytic_connection():
    t0 = time.perf_counter()
    window, nx = (-5, 5), 16384
    exact = connection_analytic(window).entries
    errs = {
        d: float(np.max(np.abs(connection_numeric(window, 0.3, delta=d, nx=nx).entries - exact)))
        for d in (1e-2, 1e-3)
    }
    ratio = errs[1e-2] / errs[1e-3]
    ok = errs[1e-3] <= 5e-6 and 50.0 <= ratio <= 150.0
    elapsed = time.perf_counter() - t0
    report(
        3,
        "analytic-connection",
        ok,
        f"err(1e-3) = {errs[1e-3]:.3e} (<= 5e-6), err ratio {ratio:.1f} (quadratic ~ 100)",
        elapsed,
        10.0,
    )


def test_criterion_4_transport_truncation():
    t0 = time.perf_counter()
    errors = []
    for size in (101, 201, 401, 801):
        half = (size - 1) // 2
        w = w_matrix_ordered((-half, half), 0.0, 1.0, steps=1)
        closed = w_matrix_closed_block((-half, half), 0.0, 1.0)
        blk, _ = w.interior_block(k_half=5)
        blk_c, _ = closed.interior_block(k_half=5)
        errors.append(float(np.max(np.abs(blk - blk_c))))
    monotone = all(b <= a for a, b in zip(errors, errors[1:]))
    ok = monotone and errors[-1] <= 0.05
    elapsed = time.perf_counter() - t0
    report(
        4,
        "transport-truncation",
        ok,
        f"errors {['%.3e' % e for e in errors]}, final <= 0.05",
        elapsed,
        60.0,
    )


def test_criterion_5_nonadiabatic_anholonomy():
    t0 = time.perf_counter()
    details = []
    ok = True
    for duration in (1.0, 10.0, 100.0):
        dt = 1e-3 * min(1.0, duration / 10.0)
        cfg = GridSolverConfig(nx=512, dt=dt, gauge=BYERS_YANG)
        final = cn_evolve_by(1, unit_cycle(duration), RING, cfg)
        ks, ov = eigenbasis_overlaps(final, 0.0, (-9, 11), RING)
        winner = int(ks[np.argmax(np.abs(ov))])
        fidelity = float(np.max(np.abs(ov)) ** 2)
        ok = ok and winner == 0 and fidelity >= 0.999
        details.append(f"T={duration:g}: winner {winner}, fidelity {fidelity:.6f}")
    elapsed = time.perf_counter() - t0
    report(5, "nonadiabatic-anholonomy", ok, "; ".join(details), elapsed, 300.0)


def test_criterion_6_extra_phase():
    t0 = time.perf_counter()
    schedule = unit_cycle(10.0)
    t = np.linspace(0.0, 10.0, 20001)
    excess = np.array(
        [corrected_eigenenergy(1, ti, schedule, RING) - eigenenergy(1, schedule.value(ti), RING) for ti in t]
    )
    quad = float(simpson(excess, x=t))
    quad_ok = abs(quad - np.pi) <= 1e-10

    cfg = GridSolverConfig(nx=512, dt=1e-3, gauge=BYERS_YANG)
    final = cn_evolve_by(1, schedule, RING, cfg)
    decomp = phase_decompose(final, 1, schedule, RING)
    residual_ok = abs(decomp.residual) <= 1e-2
    elapsed = time.perf_counter() - t0
    report(
        6,
        "extra-phase",
        quad_ok and residual_ok,
        f"quadrature {quad!r} (pi to 1e-10), numeric residual {decomp.residual:.3e} rad",
        elapsed,
        60.0,
    )


def test_criterion_7_cross_gauge_equivalence():
    t0 = time.perf_counter()
    schedule = unit_cycle(10.0)
    by = cn_evolve_by(1, schedule, RING, GridSolverConfig(nx=512, dt=1e-3, gauge=BYERS_YANG))
    per = cn_evolve_periodic(1, schedule, RING, GridSolverConfig(nx=512, dt=1e-3, gauge=PERIODIC))
    fidelity = abs(grid_overlap(to_byers_yang(per, 1.0, RING), by)) ** 2
    elapsed = time.perf_counter() - t0
    report(7, "cross-gauge-equivalence", fidelity >= 0.999, f"fidelity {fidelity:.8f}", elapsed, 120.0)


def exact_frame_overlap(k_out, k_in, dphi):
    u = k_in - k_out - dphi
    sinc = 1.0 if u == 0 else np.sin(np.pi * u) / (np.pi * u)
    return np.exp(1j * np.pi * dphi) * np.exp(1j * np.pi * u) * sinc


def _regauged_connection_fd(window, phi, eta, delta):
    """Frame-rebuilt connection: central differences of regauged exact overlaps."""
    ks = np.arange(window[0], window[1] + 1)
    n = ks.size
    out = np.empty((n, n), dtype=complex)
    for j, kb in enumerate(ks):
        for i, ka in enumerate(ks):
            fwd = (
                np.exp(-1j * eta.value(int(ka), phi))
                * exact_frame_overlap(ka, kb, delta)
                * np.exp(1j * eta.value(int(kb), phi + delta))
            )
            bwd = (
                np.exp(-1j * eta.value(int(ka), phi))
                * exact_frame_overlap(ka, kb, -delta)
                * np.exp(1j * eta.value(int(kb), phi - delta))
            )
            out[i, j] = 1j * (fwd - bwd) / (2.0 * delta)
    return out


def test_criterion_8_regauge_covariance_suite():
    t0 = time.perf_counter()
    window = (-2, 2)
    phi0, phi1 = 0.0, 1.0
    rng = np.random.default_rng(20260810)
    base_conn = connection_analytic(window)
    base_w = w_matrix_ordered(window, phi0, phi1, steps=1)
    base_m = holonomy_matrix(window, phi_start=phi0, nx=512, ring=RING)
    base_mg = geometric_holonomy(window, phi0, phi1, steps=1)
    ks = base_m.k_values
    nx = 512
    frames0 = [eigenfunction_byers_yang(k, phi0, RING, nx) for k in ks]
    cycled = [eigenfunction_byers_yang(k, phi0 + 1.0, RING, nx) for k in ks]

    worst = {"connection": 0.0, "w": 0.0, "m": 0.0, "mg": 0.0, "moduli": 0.0}
    for _ in range(100):
        eta = RegaugeFunction.random_smooth(window, rng)

        # connection law vs frame-rebuilt finite differences
        # (Richardson over delta removes the quadratic bias)
        law_conn = regauge_connection(base_conn, eta, 0.3).entries
        coarse = _regauged_connection_fd(window, 0.3, eta, 1e-3)
        fine = _regauged_connection_fd(window, 0.3, eta, 5e-4)
        rebuilt = (4.0 * fine - coarse) / 3.0
        worst["connection"] = max(worst["connection"], float(np.max(np.abs(rebuilt - law_conn))))

        # transport law vs ordered product of the regauged connection
        provider = lambda phi: regauge_connection(connection_analytic(window, phi), eta, phi)
        law_w = regauge_w(base_w, eta, phi0, phi1).entries
        w_coarse = w_matrix_ordered(window, phi0, phi1, steps=200, conn=provider).entries
        w_fine = w_matrix_ordered(window, phi0, phi1, steps=400, conn=provider).entries
        w_rebuilt = (4.0 * w_fine - w_coarse) / 3.0
        worst["w"] = max(worst["w"], float(np.max(np.abs(w_rebuilt - law_w))))

        # holonomy law vs overlaps computed in the regauged frame
        # (bras dressed with eta at phi0; cycled kets inherit the initial
        # frame phase, also at phi0; quadrature is exact here)
        law_m = regauge_holonomy(base_m, eta, phi0).entries
        phases0 = np.array([eta.value(int(k), phi0) for k in ks])
        m_rebuilt = np.empty_like(law_m)
        for j in range(ks.size):
            ket = cycled[j].samples * np.exp(-1j * np.pi) * np.exp(1j * phases0[j])
            for i in range(ks.size):
                bra = frames0[i].samples * np.exp(1j * phases0[i])
                m_rebuilt[i, j] = np.vdot(bra, ket) * frames0[i].dx
        worst["m"] = max(worst["m"], float(np.max(np.abs(m_rebuilt - law_m))))
        worst["moduli"] = max(
            worst["moduli"], float(np.max(np.abs(np.abs(law_m) - np.abs(base_m.entries))))
        )

        # geometric holonomy covariance (same Richardson pair)
        law_mg = regauge_holonomy(base_mg, eta, phi0).entries
        mg_coarse = geometric_holonomy(window, phi0, phi1, conn=provider, steps=200).entries
        mg_fine = geometric_holonomy(window, phi0, phi1, conn=provider, steps=400).entries
        mg_rebuilt = (4.0 * mg_fine - mg_coarse) / 3.0
        worst["mg"] = max(worst["mg"], float(np.max(np.abs(mg_rebuilt - law_mg))))

    ok = (
        worst["connection"] <= 1e-8
        and worst["w"] <= 1e-8
        and worst["m"] <= 1e-8
        and worst["mg"] <= 1e-8
        and worst["moduli"] <= 1e-12
    )
    elapsed = time.perf_counter() - t0
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    report(8, "regauge-covariance", ok, f"worst over 100 draws: {detail}", elapsed, 60.0)


def test_criterion_9_periodic_gauge_triviality():
    t0 = time.perf_counter()
    conn = periodic_gauge_connection((-10, 10))
    conn_zero = float(np.max(np.abs(conn.entries))) == 0.0
    w = w_matrix_ordered((-10, 10), 0.0, 1.0, steps=16, conn=lambda phi: conn)
    w_identity = float(np.max(np.abs(w.entries - np.eye(21)))) <= 1e-14

    worst_v = 0.0
    for k in range(-10, 11):
        for phi in np.arange(0.0, 1.0, 0.1):
            dv = abs(velocity_expectation(k, phi + 1.0, RING) - velocity_expectation(k - 1, phi, RING))
            worst_v = max(worst_v, dv)
    velocity_ok = worst_v <= 1e-12

    ok = conn_zero and w_identity and velocity_ok
    elapsed = time.perf_counter() - t0
    report(
        9,
        "periodic-gauge-triviality",
        ok,
        f"connection zero: {conn_zero}, transport identity: {w_identity}, "
        f"velocity shift residual {worst_v:.3e}",
        elapsed,
        30.0,
    )
