"""Raster kernel backend selection.

The compiled Cython core is preferred when present; the pure-numpy fallback
is always available. Both produce bit-identical buffers. Set
INKWASH_BACKEND=python|compiled to force a backend at import time.
"""

import os

from . import pykernels

_requested = os.environ.get("INKWASH_BACKEND", "auto")
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(f"INKWASH_BACKEND must be auto|compiled|python, got {_requested!r}")

_compiled = None
if _requested in ("auto", "compiled"):
    try:
        from . import _core
    except ImportError:
        if _requested == "compiled":
            raise
    else:
        _compiled = _core

BACKEND = "compiled" if _compiled is not None else "python"


def get_backend(name: str | None = None):
    """Resolve a backend module by name; None/'auto' selects the default."""
    if name in (None, "auto"):
        return _compiled if _compiled is not None else pykernels
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run pip install -e .")
        return _compiled
    if name == "python":
        return pykernels
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]
