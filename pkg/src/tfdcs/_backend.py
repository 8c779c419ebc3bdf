"""Kernel backend selection.

The compiled extension is preferred; ``TFDCS_PURE_PYTHON=1`` forces the
fallback, and a missing or broken build falls back silently. Both kernels are
called with float64 ndarrays for the parameter lists.
"""

import os

from . import _series_py

_forced_pure = os.environ.get("TFDCS_PURE_PYTHON", "").strip() not in ("", "0")

if _forced_pure:
    _compiled = None
else:
    try:
        from . import _series as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    pfq_sum = _compiled.pfq_sum
    BACKEND = "compiled"
else:
    pfq_sum = _series_py.pfq_sum
    BACKEND = "python"

KERNELS = {"python": _series_py.pfq_sum}
if _compiled is not None:
    KERNELS["compiled"] = _compiled.pfq_sum
