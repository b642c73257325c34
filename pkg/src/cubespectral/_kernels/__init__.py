"""Backend selection for the hot transform kernel.

The compiled Cython butterfly is used when present; otherwise the numpy
fallback. Set CUBE_SPECTRAL_BACKEND=numpy (or =compiled) to force a choice,
e.g. for the benchmark in benchmarks/bench_fwht.py.
"""

import os

from . import fallback

_requested = os.environ.get("CUBE_SPECTRAL_BACKEND", "auto").lower()

_compiled = None
if _requested in ("auto", "compiled"):
    try:
        from . import _butterfly as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
        if _requested == "compiled":
            raise ImportError(
                "CUBE_SPECTRAL_BACKEND=compiled but the extension is not built"
            )

if _compiled is not None:
    fwht_inplace = _compiled.fwht_inplace
    BACKEND = "compiled"
else:
    fwht_inplace = fallback.fwht_inplace
    BACKEND = "numpy"

__all__ = ["fwht_inplace", "BACKEND", "fallback"]
