"""Kernel backend selection.

The scalar symbol kernels exist twice: a Cython extension
(``capwhitham._kernels``, built by setup.py) and a pure-numpy fallback
(``capwhitham._kernels_py``).  The compiled core is used when it imports;
set ``CAPWHITHAM_BACKEND=python`` to force the fallback or
``CAPWHITHAM_BACKEND=cython`` to make a missing extension a hard error.
``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import _kernels_py

_requested = os.environ.get("CAPWHITHAM_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "cython"):
    raise ValueError(f"CAPWHITHAM_BACKEND must be auto|python|cython, got {_requested!r}")

_impl = _kernels_py
BACKEND = "python"
if _requested in ("auto", "cython"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        if _requested == "cython":
            raise
    else:
        _impl = _compiled
        BACKEND = "cython"

m_beta = _impl.m_beta
m_beta_d1 = _impl.m_beta_d1
m_beta_d2 = _impl.m_beta_d2
l_eps = _impl.l_eps
delta_bf = _impl.delta_bf
delta_mi_parts = _impl.delta_mi_parts
delta_mi = _impl.delta_mi
