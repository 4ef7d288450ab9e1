"""Exception types shared across the package."""


class AbringError(Exception):
    """Base class for all package-specific errors."""


class GaugeMismatchError(AbringError, ValueError):
    """A wavefunction was supplied in the wrong electromagnetic gauge."""


class WindowMismatchError(AbringError, ValueError):
    """Two windowed objects do not share a compatible eigenindex window."""


class SolverError(AbringError, RuntimeError):
    """A grid propagation failed its stability/accuracy diagnostics."""


class NotSingleEigenspaceError(AbringError, ValueError):
    """A final state has no dominant eigenmode (fidelity below 0.5)."""


class ConfigError(AbringError, ValueError):
    """A scenario configuration is malformed or carries unknown keys."""
