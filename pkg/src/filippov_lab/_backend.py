"""Selects the compiled kernel when available.

Set ``FILIPPOV_LAB_PURE=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os

from . import _oracle_py

BACKEND = "python"
scan_roots = _oracle_py.scan_roots

if os.environ.get("FILIPPOV_LAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        scan_roots = _kernels.scan_roots
        BACKEND = "cython"

__all__ = ["BACKEND", "scan_roots"]
