# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cyclic Crank-Nicolson stepping kernels.

Mirrors ``fallback.py``: one complex Thomas elimination with a
Sherman-Morrison corner correction per time step, with the whole step
loop in C.  Entry points and semantics are identical to the fallback.
"""

import numpy as np

from libc.math cimport cos, sin

ctypedef double complex dcomplex

cdef double TWO_PI = 6.283185307179586476925286766559


cdef void _solve_cyclic(Py_ssize_t n, dcomplex lower, dcomplex upper,
                        dcomplex[::1] diag, dcomplex corner_tr, dcomplex corner_bl,
                        dcomplex[::1] rhs, dcomplex[::1] out,
                        dcomplex[::1] cp, dcomplex[::1] y, dcomplex[::1] z) noexcept:
    # Rank-1 split M = T + u v^T, u = (sigma,0,..,corner_bl),
    # v = (1,0,..,corner_tr/sigma), sigma = -diag[0]; T keeps the
    # off-diagonals and loses the corners.  Both right-hand sides (rhs
    # and u) share one forward elimination.
    cdef dcomplex sigma = -diag[0]
    cdef dcomplex dlast = diag[n - 1] - corner_tr * corner_bl / sigma
    cdef dcomplex denom, di, ui, vy, vz, factor
    cdef Py_ssize_t i

    denom = diag[0] - sigma
    cp[0] = upper / denom
    y[0] = rhs[0] / denom
    z[0] = sigma / denom
    for i in range(1, n):
        di = dlast if i == n - 1 else diag[i]
        denom = di - lower * cp[i - 1]
        cp[i] = upper / denom
        ui = corner_bl if i == n - 1 else 0.0
        y[i] = (rhs[i] - lower * y[i - 1]) / denom
        z[i] = (ui - lower * z[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        y[i] = y[i] - cp[i] * y[i + 1]
        z[i] = z[i] - cp[i] * z[i + 1]
    vy = y[0] + corner_tr / sigma * y[n - 1]
    vz = z[0] + corner_tr / sigma * z[n - 1]
    factor = vy / (1.0 + vz)
    for i in range(n):
        out[i] = y[i] - factor * z[i]


def run_periodic(psi0, kappa_mid, double dt, double dx):
    """See ``fallback.run_periodic``."""
    psi_arr = np.array(psi0, dtype=np.complex128)
    kap_arr = np.ascontiguousarray(kappa_mid, dtype=np.float64)
    cdef dcomplex[::1] psi = psi_arr
    cdef double[::1] kap = kap_arr
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t nsteps = kap.shape[0]

    work = np.empty((6, n), dtype=np.complex128)
    cdef dcomplex[::1] diag = work[0]
    cdef dcomplex[::1] rhs = work[1]
    cdef dcomplex[::1] out = work[2]
    cdef dcomplex[::1] cp = work[3]
    cdef dcomplex[::1] ybuf = work[4]
    cdef dcomplex[::1] zbuf = work[5]

    cdef dcomplex I = 1j
    cdef double a = -0.5 / (dx * dx)
    cdef dcomplex c = I * (0.5 * dt)
    cdef dcomplex hu, hl, bu, bl, ad, bd
    cdef double kappa, hd
    cdef Py_ssize_t m, j, jp, jm

    for m in range(nsteps):
        kappa = kap[m]
        hu = a + I * (0.5 * kappa / dx)
        hl = a - I * (0.5 * kappa / dx)
        hd = -2.0 * a + 0.5 * kappa * kappa
        ad = 1.0 + c * hd
        bd = 1.0 - c * hd
        bu = -c * hu
        bl = -c * hl
        for j in range(n):
            jp = j + 1 if j < n - 1 else 0
            jm = j - 1 if j > 0 else n - 1
            rhs[j] = bd * psi[j] + bu * psi[jp] + bl * psi[jm]
            diag[j] = ad
        _solve_cyclic(n, c * hl, c * hu, diag, c * hl, c * hu, rhs, out, cp, ybuf, zbuf)
        for j in range(n):
            psi[j] = out[j]
    return psi_arr


def run_twisted(psi0, phi_mid, phidot_mid, double dt, double dx):
    """See ``fallback.run_twisted``."""
    psi_arr = np.array(psi0, dtype=np.complex128)
    phi_arr = np.ascontiguousarray(phi_mid, dtype=np.float64)
    dot_arr = np.ascontiguousarray(phidot_mid, dtype=np.float64)
    cdef dcomplex[::1] psi = psi_arr
    cdef double[::1] phis = phi_arr
    cdef double[::1] dots = dot_arr
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t nsteps = phis.shape[0]

    work = np.empty((6, n), dtype=np.complex128)
    cdef dcomplex[::1] diag = work[0]
    cdef dcomplex[::1] rhs = work[1]
    cdef dcomplex[::1] out = work[2]
    cdef dcomplex[::1] cp = work[3]
    cdef dcomplex[::1] ybuf = work[4]
    cdef dcomplex[::1] zbuf = work[5]
    vcoef_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] vcoef = vcoef_arr

    cdef dcomplex I = 1j
    cdef double L = n * dx
    cdef double a = -0.5 / (dx * dx)
    cdef dcomplex c = I * (0.5 * dt)
    cdef dcomplex ca = c * a
    cdef dcomplex tw_minus, tw_plus, hdc
    cdef double phi, phidot, angle
    cdef Py_ssize_t m, j, jp, jm

    for j in range(n):
        vcoef[j] = TWO_PI * (j * dx) / L

    for m in range(nsteps):
        phi = phis[m]
        phidot = dots[m]
        angle = TWO_PI * phi
        tw_minus = cos(angle) - I * sin(angle)   # psi_n    = tw_minus * psi_0
        tw_plus = cos(angle) + I * sin(angle)    # psi_{-1} = tw_plus  * psi_{n-1}
        for j in range(n):
            hdc = -2.0 * a + vcoef[j] * phidot
            diag[j] = 1.0 + c * hdc
            jp = j + 1 if j < n - 1 else 0
            jm = j - 1 if j > 0 else n - 1
            rhs[j] = (1.0 - c * hdc) * psi[j] - ca * (psi[jp] + psi[jm])
        rhs[0] += -ca * (tw_plus - 1.0) * psi[n - 1]
        rhs[n - 1] += -ca * (tw_minus - 1.0) * psi[0]
        _solve_cyclic(n, ca, ca, diag, ca * tw_plus, ca * tw_minus, rhs, out, cp, ybuf, zbuf)
        for j in range(n):
            psi[j] = out[j]
    return psi_arr
