"""Selects the compiled extension for the hot kernels when available,
falling back to the numpy implementation otherwise.

Set MESOFICK_BACKEND=python to force the fallback, MESOFICK_BACKEND=compiled
to require the extension (raises if it was never built).
"""

import os

_requested = os.environ.get("MESOFICK_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _core_py as _impl
    COMPILED = False
elif _requested == "compiled":
    from . import _core as _impl  # noqa: F401  (ImportError here is intentional)
    COMPILED = True
else:
    try:
        from . import _core as _impl
        COMPILED = True
    except ImportError:
        from . import _core_py as _impl
        COMPILED = False

band_convolve = _impl.band_convolve
neumann_resolvent = _impl.neumann_resolvent


def backend_name():
    return "compiled" if COMPILED else "python"
