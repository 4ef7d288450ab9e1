"""Backend selection for the Crank-Nicolson stepping kernels.

The compiled extension is preferred when it imported cleanly; the pure
numpy/scipy fallback is always available.  Set ``ABRING_PURE_PYTHON=1``
to force the fallback (useful for debugging and benchmarking).
"""

import os

from . import fallback

_compiled = None
if os.environ.get("ABRING_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _cyclic_cn as _compiled
    except ImportError:
        _compiled = None

_active = fallback if _compiled is None else _compiled

BACKEND = "python" if _compiled is None else "cython"

run_periodic = _active.run_periodic
run_twisted = _active.run_twisted
solve_cyclic = fallback.solve_cyclic


def available_backends():
    """Importable kernel modules keyed by backend name."""
    out = {"python": fallback}
    try:
        from . import _cyclic_cn

        out["cython"] = _cyclic_cn
    except ImportError:
        pass
    return out
