"""Backend selection for the hot convolution kernel.

The compiled Cython extension is used when importable; set NDS_NO_EXT=1 to
force the pure-numpy fallback.  Both paths accumulate taps in the same order,
so outputs are bit-identical either way.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("NDS_NO_EXT"):
    _impl = _fallback
    HAS_EXT = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        HAS_EXT = True
    except ImportError:
        _impl = _fallback
        HAS_EXT = False

BACKEND = "ext" if HAS_EXT else "fallback"

convolve2d_replicate = _impl.convolve2d_replicate
