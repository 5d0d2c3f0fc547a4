"""Backend selection for the hot kernels.

The compiled Cython core is used when available; the pure-NumPy module is a
drop-in fallback.  ``NSK1D_BACKEND=pure`` (or ``cython``) forces a choice.
"""

from __future__ import annotations

import importlib
import os

_FORCED = os.environ.get("NSK1D_BACKEND", "").strip().lower()

if _FORCED == "pure":
    from . import pure as _impl
elif _FORCED in ("cython", "compiled"):
    from . import _core as _impl  # type: ignore[no-redef]
elif _FORCED == "":
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import pure as _impl
else:
    raise RuntimeError(f"unknown NSK1D_BACKEND={_FORCED!r} (use 'pure' or 'cython')")

BACKEND = _impl.BACKEND_NAME

interp_eval = _impl.interp_eval
trace_rk4 = _impl.trace_rk4
d2_array = _impl.d2_array
d3_array = _impl.d3_array
d4_array = _impl.d4_array
d4_printed_array = _impl.d4_printed_array
central4 = _impl.central4
advect_density = _impl.advect_density
advect_velocity = _impl.advect_velocity
source_terms = _impl.source_terms
advect_stage = _impl.advect_stage


def get_backend(name: str):
    """Load a specific backend module (for benchmarks and parity tests)."""
    if name == "pure":
        return importlib.import_module("nsk1d._kernels.pure")
    if name in ("cython", "compiled"):
        return importlib.import_module("nsk1d._kernels._core")
    raise ValueError(f"unknown backend {name!r}")
