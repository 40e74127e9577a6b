"""Kernel backend selection.

The hot inner loops (least-prime-factor sieve, discrete-log tables,
character partial-sum scans) exist twice: a compiled Cython extension
(``_core``) and a vectorised numpy fallback (``pure``).  The compiled
backend is preferred; set ``CHARLAB_PURE=1`` to force the fallback.
Both expose the same three functions and agree to floating rounding
(see tests/test_kernels.py and benchmarks/bench_kernels.py).
"""

import os

if os.environ.get("CHARLAB_PURE") == "1":
    from . import pure as impl

    BACKEND = "pure"
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import pure as impl

        BACKEND = "pure"

lpf_sieve = impl.lpf_sieve
dlog_table = impl.dlog_table
family_max_prefix = impl.family_max_prefix
family_max_mult = impl.family_max_mult
