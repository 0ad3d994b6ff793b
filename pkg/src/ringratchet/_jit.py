"""Optional numba acceleration.

Setting ``RINGRATCHET_DISABLE_NUMBA=1`` (or running without numba installed)
makes :func:`njit` the identity, so every kernel runs as plain numpy/Python.
"""
import os

_FLAG = "RINGRATCHET_DISABLE_NUMBA"


def _truthy(value):
    return value.strip().lower() not in ("", "0", "false", "no", "off")


USE_NUMBA = not _truthy(os.environ.get(_FLAG, ""))

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

if USE_NUMBA:

    def njit(func):
        return numba.njit(cache=True, nogil=True)(func)

else:

    def njit(func):
        return func


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
