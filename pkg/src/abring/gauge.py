"""Gauge transforms of sampled states and phase-redefinition covariance.

The Byers-Yang transform multiplies a periodic-gauge wavefunction by
exp(-i*q*int_0^x A dx') = exp(-i*2*pi*phi*x/L), trading the vector
potential for a twisted boundary condition.  Both directions are pure
sample-wise phases, so norms are preserved to rounding.

Independently of the electromagnetic gauge, the eigenframe of the
twisted-gauge Hamiltonian is only fixed up to per-mode phases
eta_k(phi).  Redefining the frame by exp(i*eta_k(phi)) transforms the
derived objects covariantly:

    connection:  A'_{ab} = exp(-i(eta_a - eta_b)) A_{ab} - eta_b' delta_{ab}
    transport:   W'_{ab} = exp(-i eta_a(phi')) W_{ab} exp(+i eta_b(phi''))
    holonomy:    M'_{ab} = exp(-i eta_a(phi')) M_{ab} exp(+i eta_b(phi'))

(a = outgoing row index, b = incoming column index; the holonomy law
takes both phases at the path start because the cycled state inherits
only the initial frame phase).  These three laws are implemented here
and exercised against frame-rebuilt oracles in the tests.
"""

import numpy as np

from .errors import GaugeMismatchError, WindowMismatchError
from .ring import BYERS_YANG, PERIODIC, TWO_PI, WavefunctionGrid


def to_byers_yang(psi, phi, ring):
    """Map a periodic-gauge grid to the twisted (Byers-Yang) gauge at flux ``phi``."""
    if psi.gauge != PERIODIC:
        raise GaugeMismatchError(f"to_byers_yang expects a periodic-gauge state, got {psi.gauge!r}")
    factor = np.exp(-1j * TWO_PI * phi * psi.x / ring.circumference)
    return WavefunctionGrid(
        samples=psi.samples * factor, gauge=BYERS_YANG, flux=float(phi), length=psi.length
    )


def from_byers_yang(psi, phi, ring):
    """Inverse of :func:`to_byers_yang`; returns a periodic-gauge grid."""
    if psi.gauge != BYERS_YANG:
        raise GaugeMismatchError(f"from_byers_yang expects a byers-yang state, got {psi.gauge!r}")
    factor = np.exp(+1j * TWO_PI * phi * psi.x / ring.circumference)
    return WavefunctionGrid(
        samples=psi.samples * factor, gauge=PERIODIC, flux=float(phi), length=psi.length
    )


class RegaugeFunction:
    """Per-mode smooth phase eta_k(phi) with its analytic flux derivative.

    ``value(k, phi)`` and ``derivative(k, phi)`` must accept an integer
    mode index and a float flux.  An optional window restricts the modes
    the function is defined for; windowed instances are checked against
    matrix windows before use.
    """

    def __init__(self, value, derivative, window=None):
        self._value = value
        self._derivative = derivative
        self.window = None if window is None else (int(window[0]), int(window[1]))

    def value(self, k, phi):
        return float(self._value(k, phi))

    def derivative(self, k, phi):
        return float(self._derivative(k, phi))

    def phases(self, ks, phi):
        return np.array([self.value(int(k), phi) for k in ks])

    def rates(self, ks, phi):
        return np.array([self.derivative(int(k), phi) for k in ks])

    def check_window(self, window):
        if self.window is None:
            return
        if self.window[0] > window[0] or self.window[1] < window[1]:
            raise WindowMismatchError(
                f"regauge window {self.window} does not cover matrix window {tuple(window)}"
            )

    @classmethod
    def zero(cls):
        return cls(lambda k, phi: 0.0, lambda k, phi: 0.0)

    @classmethod
    def constant(cls, c):
        return cls(lambda k, phi: c, lambda k, phi: 0.0)

    @classmethod
    def linear(cls, slope):
        """Mode-independent linear phase eta_k(phi) = slope * phi."""
        return cls(lambda k, phi: slope * phi, lambda k, phi: slope)

    @classmethod
    def random_smooth(cls, window, rng, harmonics=2, amplitude=0.25, period=2.0):
        """Random draw: per-mode slope plus a low-order Fourier series.

        eta_k(phi) = c_k*phi + sum_m [a_km cos(2 pi m phi/P) + b_km sin(2 pi m phi/P)]

        Coefficients shrink like 1/m so the draws stay gentle; the
        derivative is assembled analytically from the same coefficients.
        """
        kmin, kmax = int(window[0]), int(window[1])
        ks = range(kmin, kmax + 1)
        omega = TWO_PI / period
        table = {}
        for k in ks:
            slope = rng.uniform(-amplitude, amplitude)
            a = rng.uniform(-amplitude, amplitude, size=harmonics) / np.arange(1, harmonics + 1)
            b = rng.uniform(-amplitude, amplitude, size=harmonics) / np.arange(1, harmonics + 1)
            table[k] = (slope, a, b)

        def value(k, phi):
            slope, a, b = table[k]
            m = np.arange(1, harmonics + 1)
            return slope * phi + np.sum(a * np.cos(m * omega * phi) + b * np.sin(m * omega * phi))

        def derivative(k, phi):
            slope, a, b = table[k]
            m = np.arange(1, harmonics + 1)
            return slope + np.sum(m * omega * (-a * np.sin(m * omega * phi) + b * np.cos(m * omega * phi)))

        return cls(value, derivative, window=(kmin, kmax))


def apply_regauge_to_state(psi, eta, k):
    """Multiply a sampled eigenstate by its frame phase exp(i*eta_k(flux))."""
    phase = np.exp(1j * eta.value(k, psi.flux))
    return psi.with_samples(psi.samples * phase)


def regauge_connection(conn, eta, phi):
    """Transform a connection matrix under a frame-phase redefinition.

    Off-diagonals pick up exp(-i(eta_row - eta_col)); the diagonal is
    shifted by -d(eta_col)/dphi.
    """
    eta.check_window(conn.window)
    ks = conn.k_values
    phases = eta.phases(ks, phi)
    rates = eta.rates(ks, phi)
    factor = np.exp(-1j * (phases[:, None] - phases[None, :]))
    entries = factor * conn.entries - np.diag(rates)
    return conn.with_entries(entries)


def regauge_w(w, eta, phi_start, phi_end):
    """Transform a basis-transport matrix: rows at phi_start, columns at phi_end."""
    eta.check_window(w.window)
    ks = w.k_values
    row = np.exp(-1j * eta.phases(ks, phi_start))
    col = np.exp(+1j * eta.phases(ks, phi_end))
    return w.with_entries(row[:, None] * w.entries * col[None, :])


def regauge_holonomy(m, eta, phi_start):
    """Transform a holonomy matrix; both phases evaluated at the path start."""
    eta.check_window(m.window)
    ks = m.k_values
    row = np.exp(-1j * eta.phases(ks, phi_start))
    col = np.exp(+1j * eta.phases(ks, phi_start))
    return m.with_entries(row[:, None] * m.entries * col[None, :])
