"""Selects the noise kernel at import time.

The compiled kernel is preferred when it was built; the pure-Python kernel
is the fallback. Set ``DPTAB_PURE_PYTHON=1`` to force the fallback (used by
the benchmark comparing both). The two kernels are draw-for-draw identical
for a fixed key.
"""

import os

from dptab.mechanisms import _kernel_py

if os.environ.get("DPTAB_PURE_PYTHON"):
    _impl = _kernel_py
else:
    try:
        from dptab.mechanisms import _kernel_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

BACKEND = _impl.BACKEND
BitStream = _impl.BitStream
sample_dgauss = _impl.sample_dgauss


def kernels():
    """All available kernels, for tests and benchmarks."""
    out = {"python": _kernel_py}
    try:
        from dptab.mechanisms import _kernel_cy

        out["cython"] = _kernel_cy
    except ImportError:
        pass
    return out
