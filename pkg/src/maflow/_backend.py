"""Backend selection for the stepping kernels.

The compiled extension (maflow._core) is preferred; the numpy module is
the fallback. Override with MAFLOW_BACKEND=python or MAFLOW_BACKEND=compiled.
"""

import os
import warnings

from . import _kernels_np


def _load():
    choice = os.environ.get("MAFLOW_BACKEND", "auto")
    if choice not in ("auto", "python", "compiled"):
        raise ValueError(f"MAFLOW_BACKEND must be auto, python or compiled, "
                         f"got {choice!r}")
    if choice == "python":
        return _kernels_np, "python"
    try:
        from . import _core
        return _core, "compiled"
    except ImportError as exc:
        if choice == "compiled":
            raise ImportError(f"compiled backend requested but unavailable: {exc}")
        warnings.warn(f"maflow compiled kernels unavailable ({exc}); "
                      f"using the numpy fallback", RuntimeWarning)
        return _kernels_np, "python"


_impl, BACKEND = _load()

rhs_n1 = _impl.rhs_n1
rhs_n2 = _impl.rhs_n2
