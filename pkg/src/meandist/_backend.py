"""Selects the compiled kernels when importable, otherwise the numpy ones.

Set MEANDIST_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("MEANDIST_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _kernels_py


def overlap_values(A, B, kind, K):
    return _impl.overlap_values(A, B, kind, K)


def mc_accumulate(simp_a, cdf_a, simp_b, cdf_b, p, UA, UB):
    return _impl.mc_accumulate(simp_a, cdf_a, simp_b, cdf_b, p, UA, UB)
