"""Flux-driven quantum ring toolkit.

A charged particle on a ring threaded by a time-dependent magnetic flux
is simple enough to solve in closed form and rich enough to exhibit
spectral-flow anholonomy: sweeping the flux by one quantum maps every
eigenvalue and eigenstate onto its neighbor.  This package provides the
closed-form model, the gauge machinery that makes the effect visible,
the connection/transport/holonomy matrices that encode it, and two
independent Crank-Nicolson solvers that verify it numerically.
"""

from .connection import (
    ConnectionMatrix,
    HolonomyMatrix,
    connection_analytic,
    connection_numeric,
    geometric_holonomy,
    holonomy_matrix,
    matrix_from_dict,
    matrix_to_dict,
    periodic_gauge_connection,
    save_matrix_csv,
    save_matrix_json,
    shift_pattern,
    w_matrix_closed,
    w_matrix_closed_block,
    w_matrix_ordered,
)
from .errors import (
    AbringError,
    ConfigError,
    GaugeMismatchError,
    NotSingleEigenspaceError,
    SolverError,
    WindowMismatchError,
)
from .gauge import (
    RegaugeFunction,
    apply_regauge_to_state,
    from_byers_yang,
    regauge_connection,
    regauge_holonomy,
    regauge_w,
    to_byers_yang,
)
from .propagate import (
    GridSolverConfig,
    PhaseDecomposition,
    cn_evolve_by,
    cn_evolve_periodic,
    cn_time_series,
    corrected_eigenenergy,
    dynamical_phase,
    eigenbasis_overlaps,
    exact_evolve_periodic,
    exact_final_by,
    phase_decompose,
)
from .ring import (
    BYERS_YANG,
    PERIODIC,
    FluxSchedule,
    RingConfig,
    WavefunctionGrid,
    current_expectation,
    eigenenergy,
    eigenfunction_byers_yang,
    eigenfunction_periodic,
    grid_overlap,
    spectrum_window,
    velocity_expectation,
    velocity_expectation_grid,
    wrap_angle,
)

__version__ = "0.1.0"
