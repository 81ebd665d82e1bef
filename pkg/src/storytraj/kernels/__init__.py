"""Solver kernels with a compiled fast path.

The Cython extension is used when it imported cleanly; otherwise the
pure-Python implementation takes over. Set STORYTRAJ_PURE=1 to force the
fallback (used by the benchmark and the backend-equivalence tests). Both
backends are bit-for-bit interchangeable.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("STORYTRAJ_PURE"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

held_karp = _impl.held_karp
nearest_neighbor = _impl.nearest_neighbor
refine = _impl.refine


def available_backends() -> dict[str, object]:
    """Importable backend modules keyed by name."""
    backends: dict[str, object] = {"pure": _pure}
    try:
        from . import _fast

        backends["cython"] = _fast
    except ImportError:
        pass
    return backends
