"""Hot-kernel dispatch.

The inner loops of the library (truncated-series convolution and torus grid
sweeps) are implemented twice: once in Cython (`_kernels`, built at install
time when a compiler is available) and once in numpy (`_kernels_py`).  The
compiled backend is preferred; set POLYJET_FORCE_PYTHON=1 to force the
fallback.  Both backends implement the same contracts and agree to rounding.
"""

import os

from . import _kernels_py

if os.environ.get("POLYJET_FORCE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

conv_acc = _impl.conv_acc
poly_grid_topk = _impl.poly_grid_topk
bilinear_grid_topk = _impl.bilinear_grid_topk


def backends():
    """Mapping of backend name to module, for tests and benchmarks."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels  # noqa: PLC0415

        found["compiled"] = _kernels
    except ImportError:
        pass
    return found
