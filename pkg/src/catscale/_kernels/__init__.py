"""Kernel backend selection.

The compiled backend is used when the extension was built; otherwise the
NumPy implementation takes over with identical semantics.  Set
CATSCALE_KERNELS=python (or =cython) to force a choice, e.g. for the
benchmark script or for debugging a suspected kernel issue.
"""

import os

from . import _pykernels

_forced = os.environ.get("CATSCALE_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = _pykernels
elif _forced == "cython":
    from . import _cykernels as _impl  # hard error if forced but not built
else:
    try:
        from . import _cykernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

scatter_profile = _impl.scatter_profile
density_at_points = _impl.density_at_points
displacement_block = _impl.displacement_block


def get_backend() -> str:
    """Name of the kernel backend in use: 'cython' or 'python'."""
    return BACKEND
