"""Backend selection for the hot GF(2) kernels.

The numba path is used when numba imports cleanly and the environment
variable ``SDBB_PURE_NUMPY`` is unset (or set to ``0``). Setting it to
``1`` forces the vectorised numpy implementations, which are slower but
have no compilation step.
"""

from __future__ import annotations

import os

_FLAG = "SDBB_PURE_NUMPY"


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except Exception:  # pragma: no cover - depends on environment
        return False
    return True


def _flag_set() -> bool:
    return os.environ.get(_FLAG, "0").strip().lower() not in ("", "0", "false", "no")


HAVE_NUMBA = _numba_available()
USE_NUMBA = HAVE_NUMBA and not _flag_set()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is present, otherwise an identity decorator."""
    if HAVE_NUMBA:
        import numba

        return numba.njit(*args, cache=True, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
