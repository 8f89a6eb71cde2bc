"""Raster kernel backend selection.

Imports the compiled extension when present, otherwise the pure-numpy
fallback.  Set HNCG_FORCE_PYTHON=1 to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

import os

from . import _raster_py

if os.environ.get("HNCG_FORCE_PYTHON") == "1":
    _backend = _raster_py
    _backend_name = "python"
else:
    try:
        from . import _raster_ext as _backend  # type: ignore[no-redef]

        _backend_name = "compiled"
    except ImportError:
        _backend = _raster_py
        _backend_name = "python"

fill_triangles = _backend.fill_triangles
fill_triangles_python = _raster_py.fill_triangles


def active_backend() -> str:
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return _backend_name
