"""Hot-loop kernels with a compiled fast path.

The compiled Cython module is preferred when it imported cleanly; the pure
NumPy module is the fallback.  Set ``SIGSAL_PURE=1`` to force the fallback.
Both backends expose the same three functions:

    bilateral(img, sigma_spatial, sigma_range, radius)    -> filtered image
    conv2d(x, kernel, bias, stride, pads)                 -> feature map
    xoshiro_fill(state, out)                              -> fills out, advances state

The xoshiro fill is exact integer arithmetic, so streams are bitwise equal
across backends.  The float kernels agree to summation-order rounding.
"""

import os

from sigsal.kernels import pure as _pure

BACKEND = "pure"
_impl = _pure

if os.environ.get("SIGSAL_PURE", "0") not in ("1", "true", "yes"):
    try:
        from sigsal.kernels import _fast as _impl  # noqa: F811
        BACKEND = "compiled"
    except ImportError:
        pass

bilateral = _impl.bilateral
conv2d = _impl.conv2d
xoshiro_fill = _impl.xoshiro_fill


def available_backends():
    """name -> module for every importable backend (benchmark helper)."""
    found = {"pure": _pure}
    try:
        from sigsal.kernels import _fast
        found["compiled"] = _fast
    except ImportError:
        pass
    return found
