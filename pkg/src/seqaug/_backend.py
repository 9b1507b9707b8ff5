"""Kernel backend selection: compiled extension when built, pure Python otherwise.

Both backends produce bit-identical draws and outputs, so the choice only
affects speed. ``SEQAUG_BACKEND=python`` (or ``=native``) forces one at
import time; ``use()`` swaps temporarily, e.g. for benchmarking both.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

from . import _pykernels

try:
    from . import _native
except ImportError:  # extension not built; the fallback is fully equivalent
    _native = None

_BACKENDS = {"python": _pykernels}
if _native is not None:
    _BACKENDS["native"] = _native


def _initial():
    forced = os.environ.get("SEQAUG_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(f"SEQAUG_BACKEND={forced!r} requested but not available "
                              f"(have: {sorted(_BACKENDS)})")
        return _BACKENDS[forced]
    return _BACKENDS.get("native", _pykernels)


_active = _initial()


def active():
    return _active


def active_name() -> str:
    return _active.NAME


def available() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r} (have: {sorted(_BACKENDS)})") from None


@contextmanager
def use(name: str):
    """Temporarily make ``name`` the active backend."""
    global _active
    prev = _active
    _active = get(name)
    try:
        yield _active
    finally:
        _active = prev
