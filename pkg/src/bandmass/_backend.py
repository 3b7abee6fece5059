"""Select the fiber-matrix assembly kernel.

The compiled kernel is used when it was built; setting ``BANDMASS_PURE=1``
forces the numpy fallback.
"""

import os

from . import _assemble_py

if os.environ.get("BANDMASS_PURE", "") not in ("", "0"):
    assemble = _assemble_py.assemble
    BACKEND = "python"
else:
    try:
        from ._assemble import assemble
        BACKEND = "cython"
    except ImportError:
        assemble = _assemble_py.assemble
        BACKEND = "python"

__all__ = ["assemble", "BACKEND"]
