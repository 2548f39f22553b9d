"""Engine selection: the compiled trial loop when the extension built, the
pure-Python object model otherwise.

Both engines consume random streams identically, so a given configuration
produces byte-identical records on either; only speed differs.  Set
``EVOSORT_PURE=1`` (or pass engine="pure") to force the fallback.
"""

from __future__ import annotations

import os

try:
    from . import _kernels  # noqa: F401
    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def resolve(name: str = "auto") -> str:
    if name not in ("auto", "compiled", "pure"):
        raise ValueError(f"unknown engine {name!r}")
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled engine requested but the extension "
                               "is not available")
        return "compiled"
    if name == "pure" or os.environ.get("EVOSORT_PURE"):
        return "pure"
    return "compiled" if HAVE_COMPILED else "pure"
