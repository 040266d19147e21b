"""Routing kernel backends.

Two interchangeable implementations of the per-hop routing loop exist: a
compiled Cython extension (``_fast``) and a pure-Python reference
(``reference``). The compiled one is selected at import when available;
set ``ANCHORSPACE_BACKEND=python`` or ``=cython`` to force a choice.
Both produce bit-identical paths and scalar-op counters.
"""

from __future__ import annotations

import os

from . import reference

_requested = os.environ.get("ANCHORSPACE_BACKEND", "auto")
if _requested not in ("auto", "cython", "python"):
    raise RuntimeError(
        f"ANCHORSPACE_BACKEND must be auto, cython or python, got {_requested!r}"
    )

fast = None
if _requested in ("auto", "cython"):
    try:
        from . import _fast as fast
    except ImportError:
        if _requested == "cython":
            raise RuntimeError(
                "ANCHORSPACE_BACKEND=cython but the compiled kernel is not built"
            )

DEFAULT_BACKEND = "cython" if fast is not None else "python"


def active_backend() -> str:
    """Name of the backend route() uses by default."""
    return DEFAULT_BACKEND


def available_backends() -> tuple[str, ...]:
    return ("python", "cython") if fast is not None else ("python",)
