"""Pure numpy/scipy Crank-Nicolson stepping kernels.

Same contracts as the compiled extension ``_cyclic_cn``; each step
solves one cyclic tridiagonal system by a Sherman-Morrison rank-1
split on top of ``scipy.linalg.solve_banded``.
"""

import numpy as np
from scipy.linalg import solve_banded

TWO_PI = 2.0 * np.pi


def solve_cyclic(diag, lower, upper, corner_tr, corner_bl, rhs):
    """Solve a cyclic tridiagonal system.

    ``diag`` is the length-n main diagonal; ``lower``/``upper`` are the
    constant off-diagonal values; ``corner_tr``/``corner_bl`` sit at
    [0, n-1] and [n-1, 0].  Rank-1 split: M = T + u v^T with
    u = (sigma, 0, ..., corner_bl), v = (1, 0, ..., corner_tr/sigma) and
    sigma = -diag[0], so T stays tridiagonal with modified end entries.
    """
    n = diag.size
    sigma = -diag[0]
    d = np.array(diag, dtype=complex)
    d[0] -= sigma
    d[-1] -= corner_tr * corner_bl / sigma

    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = d
    ab[2, :-1] = lower

    u = np.zeros(n, dtype=complex)
    u[0] = sigma
    u[-1] = corner_bl

    sol = solve_banded((1, 1), ab, np.column_stack([rhs, u]), check_finite=False)
    y, z = sol[:, 0], sol[:, 1]
    ratio = corner_tr / sigma
    vy = y[0] + ratio * y[-1]
    vz = z[0] + ratio * z[-1]
    return y - z * (vy / (1.0 + vz))


def run_periodic(psi0, kappa_mid, dt, dx):
    """Evolve a periodic-gauge state through len(kappa_mid) CN steps.

    Step m applies the Cayley transform of
    H = -0.5 d2/dx2 + i*kappa*d/dx + 0.5*kappa^2  (central differences,
    periodic wrap) with kappa = kappa_mid[m] held at the step midpoint.
    """
    psi = np.array(psi0, dtype=complex)
    n = psi.size
    a = -0.5 / dx**2
    c = 0.5j * dt
    diag = np.empty(n, dtype=complex)
    for kappa in kappa_mid:
        hu = a + 0.5j * kappa / dx
        hl = a - 0.5j * kappa / dx
        hd = -2.0 * a + 0.5 * kappa * kappa
        rhs = (1.0 - c * hd) * psi - c * hu * np.roll(psi, -1) - c * hl * np.roll(psi, 1)
        diag.fill(1.0 + c * hd)
        psi = solve_cyclic(diag, c * hl, c * hu, c * hl, c * hu, rhs)
    return psi


def run_twisted(psi0, phi_mid, phidot_mid, dt, dx):
    """Evolve a twisted-boundary state through len(phi_mid) CN steps.

    Step m applies the Cayley transform of
    H = -0.5 d2/dx2 + (2*pi*x/L)*phidot  under the boundary condition
    psi(L) = exp(-i*2*pi*phi) * psi(0), both phi and phidot held at the
    step midpoint.  The twist lives in the phase-carrying corner entries
    of the cyclic system.
    """
    psi = np.array(psi0, dtype=complex)
    n = psi.size
    L = n * dx
    x = np.arange(n) * dx
    a = -0.5 / dx**2
    c = 0.5j * dt
    ca = c * a
    vcoef = TWO_PI * x / L
    for phi, phidot in zip(phi_mid, phidot_mid):
        hd = -2.0 * a + vcoef * phidot
        tw_minus = np.exp(-1j * TWO_PI * phi)  # psi_n   = tw_minus * psi_0
        tw_plus = np.conj(tw_minus)            # psi_{-1} = tw_plus * psi_{n-1}
        rhs = (1.0 - c * hd) * psi - ca * (np.roll(psi, -1) + np.roll(psi, 1))
        rhs[0] += -ca * (tw_plus - 1.0) * psi[-1]
        rhs[-1] += -ca * (tw_minus - 1.0) * psi[0]
        psi = solve_cyclic(1.0 + c * hd, ca, ca, ca * tw_plus, ca * tw_minus, rhs)
    return psi
