"""Kernel backend selection.

Two interchangeable backends provide ``solve_theta`` and ``adaprox_loop``:
a compiled Cython module and a numpy reference implementation. Selection
happens at import time, overridable with the ``GROUPPROX_KERNELS``
environment variable (``auto``, ``python``, or ``cython``) or at runtime via
``set_backend``. Results agree across backends up to summation order;
iterate sequences and iteration counts are identical by construction.
"""

from __future__ import annotations

import os

from . import pyimpl

try:
    from . import _cykernels as cyimpl
except ImportError:
    cyimpl = None

_BACKENDS = {"python": pyimpl}
if cyimpl is not None:
    _BACKENDS["cython"] = cyimpl


def _choose(name: str):
    if name == "auto":
        return _BACKENDS.get("cython", pyimpl)
    if name not in _BACKENDS:
        raise ValueError(
            f"kernel backend {name!r} not available; have {sorted(_BACKENDS)}"
        )
    return _BACKENDS[name]


_active = _choose(os.environ.get("GROUPPROX_KERNELS", "auto"))


def kernels():
    """The active backend module."""
    return _active


def backend_name() -> str:
    return _active.NAME


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> str:
    """Force a backend by name ('auto', 'python', 'cython'); returns the pick."""
    global _active
    _active = _choose(name)
    return _active.NAME
