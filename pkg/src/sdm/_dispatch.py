"""Kernel dispatch: numba-jitted lane vs pure-Python fallback lane.

Every hot loop in this package is written once, as a module-level function
decorated with ``maybe_njit``. When numba is importable and the environment
variable ``SDM_JIT`` is not "0", the decorator compiles the function with
``numba.njit(cache=True)``; otherwise the plain Python function is used.
The lane is chosen once, at import time, so cross-calls between kernels
resolve to the same lane everywhere.

Construction-time code also needs a hash map for suffix-tree children
(frozen into flat arrays afterwards). ``new_child_map`` hands back a
numba ``typed.Dict`` on the jit lane and an ordinary dict on the fallback
lane; both support the same operations the kernels use.
"""

from __future__ import annotations

import os

_env = os.environ.get("SDM_JIT", "").strip()
if _env == "0":
    _want_jit = False
else:
    _want_jit = True

HAS_NUMBA = False
if _want_jit:
    try:
        import numba
        from numba import njit
        from numba import typed, types

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False

JIT_ENABLED = HAS_NUMBA

# Numba caches compiled kernels on disk next to the source; harmless and it
# makes repeat CLI invocations fast.
_NJIT_OPTIONS = {"cache": True}


def maybe_njit(func):
    """Compile ``func`` with numba on the jit lane, return it as-is otherwise."""
    if JIT_ENABLED:
        return njit(**_NJIT_OPTIONS)(func)
    return func


def new_child_map():
    """Fresh (int64 -> int64) map usable inside kernels of the active lane."""
    if JIT_ENABLED:
        return typed.Dict.empty(key_type=types.int64, value_type=types.int64)
    return {}


def lane_name() -> str:
    return "jit" if JIT_ENABLED else "fallback"
