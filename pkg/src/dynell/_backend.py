"""Select the theta kernel backend at import time.

The compiled Cython core is preferred; the pure-Python fallback has the
identical API and numerics. Set DYNELL_PURE_PYTHON=1 to force the fallback
(used by the benchmark and the backend-equivalence tests).
"""

import os

if os.environ.get("DYNELL_PURE_PYTHON"):
    from . import _theta_fallback as core
else:
    try:
        from . import _theta_core as core  # type: ignore[attr-defined]
    except ImportError:
        from . import _theta_fallback as core

BACKEND = core.BACKEND_NAME
