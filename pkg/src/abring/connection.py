"""Non-Abelian connection, basis-transport and holonomy matrices.

The twisted-gauge eigenframe psi_k(x; phi) induces a connection matrix
with entries <psi_a(phi), i d/dphi psi_b(phi)>.  For the transport-fixed
frame of :func:`abring.ring.eigenfunction_byers_yang` this evaluates to
the flux-independent Hilbert-type matrix

    A_{ab} = i / (a - b)   (a != b),      A_{aa} = 0,

while in the periodic gauge the frame is flux-independent and the
connection vanishes identically.

Transporting the frame along a flux path [phi', phi''] is the ordered
product of incremental exponentials exp(-i * A(phi_mid) * dphi) with
later-flux factors multiplying on the RIGHT, matching the convention
frame(phi'') = frame(phi') @ W.  For the untruncated flux-independent
connection the product has the closed form

    W_{ab} = exp(-i*(a-b)*pi) * sin(pi*(dphi + a - b)) / (pi*(dphi + a - b)),

which collapses to a signed one-step shift for every integer flux
increment.  Truncation to an N x N window distorts this slowly (the
interior error decays roughly like 1/N; see docs/w_truncation.md for
the measured curve), so window edges are never asserted on.

Holonomy matrices compare the cycled, dynamical-phase-stripped frame
with the initial frame.  On a unit flux cycle the overlap matrix is the
exact one-step permutation delta_{row, col-1}: the physical content of
the whole package in a single matrix.
"""

from dataclasses import dataclass

import csv
import json

import numpy as np
import scipy.linalg

from .errors import WindowMismatchError
from .ring import RingConfig, eigenfunction_byers_yang, grid_overlap

KIND_W = "W"
KIND_M = "M"
KIND_MG = "Mg"


def _window_tuple(window):
    kmin, kmax = int(window[0]), int(window[1])
    if kmin > kmax:
        raise ValueError(f"empty eigenindex window [{kmin}, {kmax}]")
    return kmin, kmax


class _WindowedMatrix:
    """Shared index bookkeeping for window-truncated complex matrices."""

    @property
    def size(self):
        return self.window[1] - self.window[0] + 1

    @property
    def k_values(self):
        return np.arange(self.window[0], self.window[1] + 1)

    def index(self, k):
        if not self.window[0] <= k <= self.window[1]:
            raise IndexError(f"eigenindex {k} outside window {self.window}")
        return int(k - self.window[0])

    def at(self, k_out, k_in):
        """Entry for outgoing (row) index k_out and incoming (column) index k_in."""
        return complex(self.entries[self.index(k_out), self.index(k_in)])

    def _validated_entries(self, entries):
        arr = np.array(entries, dtype=complex, order="C", copy=True)
        n = self.size
        if arr.shape != (n, n):
            raise ValueError(f"entries must be {n}x{n} for window {self.window}, got {arr.shape}")
        arr.flags.writeable = False
        return arr


@dataclass(frozen=True)
class ConnectionMatrix(_WindowedMatrix):
    """Window-truncated connection matrix evaluated at one flux value."""

    window: tuple
    entries: np.ndarray
    flux: float

    def __post_init__(self):
        object.__setattr__(self, "window", _window_tuple(self.window))
        object.__setattr__(self, "entries", self._validated_entries(self.entries))

    def with_entries(self, entries):
        return ConnectionMatrix(window=self.window, entries=entries, flux=self.flux)

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


@dataclass(frozen=True)
class HolonomyMatrix(_WindowedMatrix):
    """Window-truncated transport (W) or holonomy (M, Mg) matrix for one path."""

    window: tuple
    entries: np.ndarray
    kind: str
    path: tuple

    def __post_init__(self):
        object.__setattr__(self, "window", _window_tuple(self.window))
        object.__setattr__(self, "entries", self._validated_entries(self.entries))
        if self.kind not in (KIND_W, KIND_M, KIND_MG):
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        object.__setattr__(self, "path", (float(self.path[0]), float(self.path[1])))

    def with_entries(self, entries):
        return HolonomyMatrix(window=self.window, entries=entries, kind=self.kind, path=self.path)

    def unitarity_defect(self):
        """max |W^dagger W - I|; rounding-level for exponentials of Hermitian input."""
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(self.size))))

    def interior_block(self, k_half=None):
        """Central sub-block unpolluted by truncation edges.

        By default the outermost 10% of indices on each side are
        dropped; passing ``k_half`` selects the |k| <= k_half block.
        """
        ks = self.k_values
        if k_half is None:
            margin = max(1, self.size // 10)
            sel = slice(margin, self.size - margin)
            return self.entries[sel, sel], ks[sel]
        mask = np.abs(ks) <= k_half
        if not np.any(mask):
            raise ValueError(f"interior block |k| <= {k_half} empty for window {self.window}")
        idx = np.where(mask)[0]
        sel = slice(idx[0], idx[-1] + 1)
        return self.entries[sel, sel], ks[sel]


def shift_pattern(ks_out, ks_in=None):
    """Reference pattern delta_{row, col-1}: column k lands on row k-1."""
    ks_out = np.asarray(ks_out)
    ks_in = ks_out if ks_in is None else np.asarray(ks_in)
    return (ks_out[:, None] == (ks_in[None, :] - 1)).astype(complex)


# ---------------------------------------------------------------------------
# Connection builders


def connection_analytic(window, phi=0.0):
    """Exact transport-fixed-frame connection: i/(row-col) off the diagonal."""
    kmin, kmax = _window_tuple(window)
    ks = np.arange(kmin, kmax + 1)
    diff = ks[:, None] - ks[None, :]
    with np.errstate(divide="ignore"):
        entries = np.where(diff != 0, 1j / np.where(diff != 0, diff, 1), 0.0)
    return ConnectionMatrix(window=(kmin, kmax), entries=entries, flux=float(phi))


def periodic_gauge_connection(window):
    """Connection of the flux-independent periodic-gauge frame: identically zero."""
    kmin, kmax = _window_tuple(window)
    n = kmax - kmin + 1
    return ConnectionMatrix(window=(kmin, kmax), entries=np.zeros((n, n), dtype=complex), flux=0.0)


def connection_numeric(window, phi, delta=1e-3, nx=None, ring=RingConfig()):
    """Connection by central flux differences of grid-quadrature overlaps.

    Builds <psi_a(phi), i*[psi_b(phi+delta) - psi_b(phi-delta)]/(2*delta)>
    from sampled eigenfunctions.  Second-order accurate in ``delta``;
    requires nx >= 64*N so the quadrature error of each overlap stays
    below 1e-8 (the twist-corrected trapezoid of
    :func:`abring.ring.grid_overlap` makes that bound attainable).
    """
    kmin, kmax = _window_tuple(window)
    if not 0.0 < delta <= 1e-2:
        raise ValueError(f"delta must satisfy 0 < delta <= 1e-2, got {delta}")
    n = kmax - kmin + 1
    if nx is None:
        nx = 64 * n
    if nx < 64 * n:
        raise ValueError(f"nx = {nx} too small for window size {n}; need nx >= {64 * n}")
    ks = np.arange(kmin, kmax + 1)
    bras = [eigenfunction_byers_yang(k, phi, ring, nx) for k in ks]
    kets_plus = [eigenfunction_byers_yang(k, phi + delta, ring, nx) for k in ks]
    kets_minus = [eigenfunction_byers_yang(k, phi - delta, ring, nx) for k in ks]
    entries = np.empty((n, n), dtype=complex)
    for col in range(n):
        for row in range(n):
            fwd = grid_overlap(bras[row], kets_plus[col])
            bwd = grid_overlap(bras[row], kets_minus[col])
            entries[row, col] = 1j * (fwd - bwd) / (2.0 * delta)
    return ConnectionMatrix(window=(kmin, kmax), entries=entries, flux=float(phi))


# ---------------------------------------------------------------------------
# Transport matrices


def _step_unitary(entries, scale):
    """exp(-1j*scale*entries) via eigendecomposition when Hermitian, expm otherwise."""
    defect = np.max(np.abs(entries - entries.conj().T))
    if defect <= 1e-10 * max(1.0, np.max(np.abs(entries))):
        evals, vecs = np.linalg.eigh(entries)
        return (vecs * np.exp(-1j * scale * evals)) @ vecs.conj().T
    return scipy.linalg.expm(-1j * scale * entries)


def _provider_entries(conn, window, phi):
    a = conn(phi)
    if isinstance(a, ConnectionMatrix):
        if a.window != window:
            raise WindowMismatchError(
                f"connection provider returned window {a.window}, expected {window}"
            )
        return a.entries
    return np.asarray(a, dtype=complex)


def w_matrix_ordered(window, phi_start, phi_end, steps=64, conn=None):
    """Basis-transport matrix as an ordered product of midpoint exponentials.

    ``conn`` maps a flux value to a :class:`ConnectionMatrix` (or bare
    array) on the same window; by default the exact transport-fixed
    connection is used.  The path is split into ``steps`` equal
    increments; each contributes exp(-i * A(phi_mid) * dphi), multiplied
    with later-flux factors on the right.  Midpoint sampling makes the
    product second-order in the step size, and exact (up to rounding)
    whenever the connection is flux-independent.
    """
    kmin, kmax = _window_tuple(window)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if conn is None:
        conn = lambda phi: connection_analytic((kmin, kmax), phi)
    n = kmax - kmin + 1
    span = float(phi_end) - float(phi_start)
    w = np.eye(n, dtype=complex)
    if span != 0.0:
        h = span / steps
        for m in range(steps):
            mid = phi_start + (m + 0.5) * h
            w = w @ _step_unitary(_provider_entries(conn, (kmin, kmax), mid), h)
    return HolonomyMatrix(
        window=(kmin, kmax), entries=w, kind=KIND_W, path=(phi_start, phi_end)
    )


def w_matrix_closed(k_out, k_in, phi_start, phi_end):
    """Closed-form untruncated transport amplitude between two modes.

    exp(-i*(k_out-k_in)*pi) * sin(pi*u)/(pi*u) with u = dphi + k_out - k_in.
    The removable singularity at u = 0 is evaluated by series.
    """
    diff = k_out - k_in
    arg = np.pi * ((phi_end - phi_start) + diff)
    if abs(arg) < 1e-6:
        sinc = 1.0 - arg * arg / 6.0
    else:
        sinc = np.sin(arg) / arg
    return complex(np.exp(-1j * np.pi * diff) * sinc)


def w_matrix_closed_block(window, phi_start, phi_end):
    """Closed-form transport amplitudes assembled over a window."""
    kmin, kmax = _window_tuple(window)
    ks = np.arange(kmin, kmax + 1)
    entries = np.array(
        [[w_matrix_closed(a, b, phi_start, phi_end) for b in ks] for a in ks], dtype=complex
    )
    return HolonomyMatrix(
        window=(kmin, kmax), entries=entries, kind=KIND_W, path=(phi_start, phi_end)
    )


# ---------------------------------------------------------------------------
# Holonomy matrices


def holonomy_matrix(window, phi_start=0.0, nx=4096, ring=RingConfig()):
    """Frame-overlap holonomy of the unit flux cycle phi' -> phi'+1.

    Rows are the initial eigenfunctions at phi'; columns are the cycled,
    dynamical-phase-stripped states exp(-i*pi) * psi_k(x; phi'+1).  Grid
    quadrature is exact here (integer frequency differences), so the
    result is the one-step shift pattern to rounding accuracy.
    """
    kmin, kmax = _window_tuple(window)
    ks = np.arange(kmin, kmax + 1)
    bras = [eigenfunction_byers_yang(k, phi_start, ring, nx) for k in ks]
    cycled = [eigenfunction_byers_yang(k, phi_start + 1.0, ring, nx) for k in ks]
    phase = np.exp(-1j * np.pi)
    n = ks.size
    entries = np.empty((n, n), dtype=complex)
    for col in range(n):
        for row in range(n):
            entries[row, col] = phase * grid_overlap(bras[row], cycled[col])
    return HolonomyMatrix(
        window=(kmin, kmax), entries=entries, kind=KIND_M, path=(phi_start, phi_start + 1.0)
    )


def geometric_holonomy(window, phi_start, phi_end, conn=None, steps=64):
    """Adiabatic-frame holonomy built from the connection alone.

    exp(-i*pi*dphi) * W_ordered * diag(exp(+i * int A_diag dphi)),
    with the diagonal integral taken by the same midpoint sampling as
    the ordered product.  For the transport-fixed frame the diagonal
    vanishes and a unit cycle reproduces :func:`holonomy_matrix` up to
    window truncation.
    """
    kmin, kmax = _window_tuple(window)
    if conn is None:
        conn = lambda phi: connection_analytic((kmin, kmax), phi)
    w = w_matrix_ordered((kmin, kmax), phi_start, phi_end, steps=steps, conn=conn)
    n = kmax - kmin + 1
    span = float(phi_end) - float(phi_start)
    diag_integral = np.zeros(n, dtype=complex)
    if span != 0.0:
        h = span / steps
        for m in range(steps):
            mid = phi_start + (m + 0.5) * h
            diag_integral += np.diagonal(_provider_entries(conn, (kmin, kmax), mid)) * h
    entries = np.exp(-1j * np.pi * span) * w.entries * np.exp(1j * diag_integral)[None, :]
    return HolonomyMatrix(
        window=(kmin, kmax), entries=entries, kind=KIND_MG, path=(phi_start, phi_end)
    )


# ---------------------------------------------------------------------------
# Serialization (CLI wire formats)

MATRIX_CSV_HEADER = ["row_k", "col_k", "re", "im"]


def save_matrix_csv(matrix, path):
    """Write a windowed matrix as rows ``row_k,col_k,re,im``."""
    ks = matrix.k_values
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MATRIX_CSV_HEADER)
        for i, k_out in enumerate(ks):
            for j, k_in in enumerate(ks):
                z = matrix.entries[i, j]
                writer.writerow([int(k_out), int(k_in), repr(float(z.real)), repr(float(z.imag))])


def matrix_to_dict(matrix):
    """JSON-ready dict: window metadata plus flat row-major re/im arrays."""
    meta = {
        "schema_version": 1,
        "window": list(matrix.window),
        "entries_re": matrix.entries.real.ravel().tolist(),
        "entries_im": matrix.entries.imag.ravel().tolist(),
    }
    if isinstance(matrix, HolonomyMatrix):
        meta["kind"] = matrix.kind
        meta["path"] = list(matrix.path)
    else:
        meta["kind"] = "connection"
        meta["flux"] = matrix.flux
    return meta


def save_matrix_json(matrix, path):
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(matrix), fh, indent=1)


def matrix_from_dict(payload):
    """Rebuild a matrix from :func:`matrix_to_dict` output."""
    window = tuple(payload["window"])
    n = window[1] - window[0] + 1
    entries = (
        np.asarray(payload["entries_re"]) + 1j * np.asarray(payload["entries_im"])
    ).reshape(n, n)
    if payload["kind"] == "connection":
        return ConnectionMatrix(window=window, entries=entries, flux=payload["flux"])
    return HolonomyMatrix(
        window=window, entries=entries, kind=payload["kind"], path=tuple(payload["path"])
    )
