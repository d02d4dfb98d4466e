"""Selection between the compiled kernels and their NumPy twin.

The environment variable FBMCRW_BACKEND picks the implementation:
"auto" (default) prefers the compiled extension and falls back to NumPy,
"compiled" and "python" force one side.  Both backends are bit-identical;
forcing is only useful for testing and benchmarks.
"""

from __future__ import annotations

import os

from .errors import ParameterError


def load_backend(choice: str | None = None):
    """Return (kernel module, backend name) for the requested choice."""
    if choice is None:
        choice = os.environ.get("FBMCRW_BACKEND", "auto")
    choice = choice.strip().lower()
    if choice not in ("auto", "compiled", "python"):
        raise ParameterError(f"unknown backend {choice!r}")
    if choice == "python":
        from . import _kernels_py
        return _kernels_py, "python"
    try:
        from . import _kernels
        return _kernels, "compiled"
    except ImportError:
        if choice == "compiled":
            raise
        from . import _kernels_py
        return _kernels_py, "python"


kernels, backend_name = load_backend()
