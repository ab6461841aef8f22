"""Select the step kernels at import: compiled extension if present, numpy otherwise.

Set ``SYMWALK_BACKEND=python`` to force the numpy kernels.
"""

import os

from . import _pykernels

py_kernels = _pykernels

try:
    from . import _ckernels as c_kernels
except ImportError:  # extension not built
    c_kernels = None

if c_kernels is not None and os.environ.get("SYMWALK_BACKEND", "").lower() != "python":
    kernels = c_kernels
    BACKEND = "cython"
else:
    kernels = _pykernels
    BACKEND = "python"


def get_kernels(name=None):
    """Kernel module by name (``"cython"`` or ``"python"``); ``None`` gives the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "cython":
        if c_kernels is None:
            raise ImportError("compiled kernels are not built")
        return c_kernels
    raise ValueError(f"unknown backend {name!r}")
