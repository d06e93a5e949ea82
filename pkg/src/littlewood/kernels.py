"""Backend selection for the hot scan kernel.

The compiled extension ``littlewood._kernels`` is used when it was built;
otherwise the NumPy fallback.  Set ``LITTLEWOOD_PURE=1`` to force the
fallback.
"""

import os

from . import _fallback

BACKEND = "numpy"
prefilter = _fallback.prefilter

if os.environ.get("LITTLEWOOD_PURE") != "1":
    try:
        from ._kernels import prefilter  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass


def backends() -> dict:
    """All importable implementations, keyed by name."""
    found = {"numpy": _fallback.prefilter}
    try:
        from ._kernels import prefilter as compiled
        found["cython"] = compiled
    except ImportError:
        pass
    return found
