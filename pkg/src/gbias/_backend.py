"""Select the kernel implementation at import time.

The compiled extension ``gbias._core`` is preferred. Setting the
environment variable ``GBIAS_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _fallback

if os.environ.get("GBIAS_PURE_PYTHON", "").strip() not in ("", "0"):
    impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as impl
        BACKEND = "compiled"
    except ImportError:  # extension not built
        impl = _fallback
        BACKEND = "python"


def available():
    """Names of the importable backends."""
    names = ["python"]
    try:
        from . import _core  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get(name):
    """Return the kernel module for ``name`` ('compiled' or 'python')."""
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
