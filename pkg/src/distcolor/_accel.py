"""Backend switch for the compiled kernels.

Hot loops live in ``_kernels.py`` as plain Python over numpy arrays and are
compiled with numba when it is available. Setting ``DISTCOLOR_BACKEND=numpy``
routes callers to a second, uncompiled copy of that module (and, for the
cell-list search and graph powers, to vectorized numpy/scipy code instead).
The variable is read at call time so tests and benchmarks can flip it.
"""

import importlib.util
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

ENV_VAR = "DISTCOLOR_BACKEND"

_compile = True
_pure = None


def backend():
    """Return ``"numba"`` or ``"numpy"`` for the current environment."""
    value = os.environ.get(ENV_VAR, "numba").strip().lower()
    if value in ("numpy", "python", "off", "0") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


def use_numba():
    return backend() == "numba"


def njit(fn):
    if not (_compile and HAVE_NUMBA):
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def _load_pure():
    global _compile
    from . import _kernels

    spec = importlib.util.spec_from_file_location("distcolor._kernels_pure", _kernels.__file__)
    module = importlib.util.module_from_spec(spec)
    _compile = False
    try:
        spec.loader.exec_module(module)
    finally:
        _compile = True
    return module


def kernels():
    """The kernel module matching the active backend."""
    global _pure
    if use_numba():
        from . import _kernels

        return _kernels
    if _pure is None:
        _pure = _load_pure()
    return _pure
