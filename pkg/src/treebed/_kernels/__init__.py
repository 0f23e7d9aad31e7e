"""Kernel dispatch.

The hot loops (K(2)-counting, pairwise joint-degree minima, reservoir family
scans) exist twice: a compiled Cython module ``_speed`` and a pure-Python
twin ``_pure`` with identical semantics. Selection happens at import time,
controlled by the TREEBED_KERNEL environment variable:

    auto  - compiled if importable, else pure (default)
    cy    - compiled, ImportError if the extension is missing
    py    - pure Python
"""

import os

from . import _pure

_choice = os.environ.get("TREEBED_KERNEL", "auto").lower()

if _choice == "py":
    _impl = _pure
elif _choice == "cy":
    from . import _speed as _impl  # type: ignore[no-redef]
elif _choice == "auto":
    try:
        from . import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure
else:
    raise RuntimeError(f"TREEBED_KERNEL must be auto, cy or py, not {_choice!r}")

IMPL = _impl.IMPL
build_ctx = _impl.build_ctx
k22_count = _impl.k22_count
min_pair_joint_degree = _impl.min_pair_joint_degree
reservoir_family_check = _impl.reservoir_family_check

__all__ = [
    "IMPL",
    "build_ctx",
    "k22_count",
    "min_pair_joint_degree",
    "reservoir_family_check",
]
