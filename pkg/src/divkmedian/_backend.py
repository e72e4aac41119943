"""Kernel selection.

The compiled extension is used when it imports; ``DIVKMEDIAN_PURE=1`` forces
the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("DIVKMEDIAN_PURE"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

nearest_two = kernels.nearest_two
swap_deltas = kernels.swap_deltas
subset_costs = kernels.subset_costs
