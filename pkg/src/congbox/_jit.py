"""
Numba switch.

Set ``CONGBOX_DISABLE_JIT=1`` to run every kernel on its pure-numpy path
(useful for debugging and for the benchmark comparison).  When numba is
missing the numpy paths are used automatically.
"""
import os

_flag = os.environ.get("CONGBOX_DISABLE_JIT", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")

try:
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and not DISABLED_BY_ENV


def njit(func=None, **kwargs):
    """``numba.njit`` when available, identity otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        if func is not None:
            return _njit(**kwargs)(func)
        return _njit(**kwargs)
    if func is not None:
        return func
    return lambda f: f
