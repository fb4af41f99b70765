"""Runtime selection of the numeric backend.

The enumeration and batch-evaluation kernels exist twice: a numba
``@njit`` version and a pure-numpy version. Which one runs is decided once
at import time from the ``ADEXT_BACKEND`` environment variable:

* ``ADEXT_BACKEND=numba`` — require numba, fail loudly if missing;
* ``ADEXT_BACKEND=numpy`` — force the vectorized numpy path;
* unset or ``auto`` — use numba when importable, numpy otherwise.

Both paths enumerate in the same order and produce identical results;
``benchmarks/kernel_bench.py`` compares their throughput.
"""

from __future__ import annotations

import os

_choice = os.environ.get("ADEXT_BACKEND", "auto").strip().lower()

if _choice in ("numpy", "python"):
    HAS_NUMBA = False
elif _choice == "numba":
    import numba  # noqa: F401  (fail fast if the forced backend is absent)

    HAS_NUMBA = True
elif _choice in ("auto", ""):
    try:
        import numba  # noqa: F401

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False
else:
    raise RuntimeError(f"ADEXT_BACKEND={_choice!r} not understood (numba|numpy|auto)")

BACKEND = "numba" if HAS_NUMBA else "numpy"
