"""Optional numba acceleration.

Kernels are written in the numba-compatible subset of Python so the same
source runs either compiled or interpreted.  Set ``QMAT_DISABLE_JIT=1`` to
force the interpreted path (useful for debugging and for the benchmark that
compares both).
"""

from __future__ import annotations

import os

JIT_DISABLED = os.environ.get("QMAT_DISABLE_JIT", "").strip() not in ("", "0")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None and not JIT_DISABLED


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when available, otherwise the identity."""
    kwargs.setdefault("cache", True)

    def wrap(f):
        if not HAS_NUMBA:
            return f
        return numba.njit(**kwargs)(f)

    if func is not None:
        return wrap(func)
    return wrap


def backend() -> str:
    return "numba" if HAS_NUMBA else "python"
