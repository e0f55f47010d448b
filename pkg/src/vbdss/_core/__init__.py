"""Kernel backend selection.

The hot kernels (triple-index probes, bounded Levenshtein) exist twice:
compiled (``_native``, Cython) and pure Python (``_pure``). The compiled
module is preferred when importable; VBDSS_PURE_PYTHON=1 forces the
fallback. Both expose the same surface and are interchangeable; tests and
``vbd bench --backend both`` exercise the equivalence.
"""

from __future__ import annotations

import os

from . import _pure


def _select():
    if os.environ.get("VBDSS_PURE_PYTHON") == "1":
        return _pure
    try:
        from . import _native  # type: ignore[attr-defined]

        return _native
    except ImportError:
        return _pure


_impl = _select()

BACKEND = _impl.BACKEND
WILD = _impl.WILD
TripleIndex = _impl.TripleIndex
bounded_levenshtein = _impl.bounded_levenshtein


def available_backends() -> dict[str, object]:
    """Name -> module for every importable backend."""
    backends: dict[str, object] = {"pure": _pure}
    try:
        from . import _native  # type: ignore[attr-defined]

        backends["native"] = _native
    except ImportError:
        pass
    return backends


def get_backend(name: str):
    backends = available_backends()
    if name not in backends:
        raise KeyError(f"kernel backend {name!r} not available (have: {sorted(backends)})")
    return backends[name]
