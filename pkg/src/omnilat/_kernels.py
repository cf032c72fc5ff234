"""Kernel selection.

The hot loops (length-targeted transversal search, species canonical form)
exist twice: a Cython extension (omnilat._speed) and a pure-Python twin
(omnilat._fallback) with identical inputs and outputs.  The extension is
used when importable; set OMNILAT_PURE=1 to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("OMNILAT_PURE"):
    from . import _fallback as _impl

    backend_name = "pure"
else:
    try:
        from . import _speed as _impl  # type: ignore[attr-defined]

        backend_name = "compiled"
    except ImportError:
        from . import _fallback as _impl

        backend_name = "pure"

ACHIEVED = 0
EXHAUSTED = 1
TIMEOUT = 2

search = _impl.search
species_min = _impl.species_min
