"""Select the batch-kernel implementation at import time.

Prefers the compiled extension and falls back to the pure-numpy reference.
Set NOTCHCAST_BACKEND=pure (or =compiled) to force a choice; forcing
"compiled" raises if the extension was not built.
"""

from __future__ import annotations

import os

from . import _reference

_requested = os.environ.get("NOTCHCAST_BACKEND", "").strip().lower()

if _requested == "pure":
    _impl = _reference
    BACKEND = "pure"
elif _requested == "compiled":
    from . import _kernels as _impl  # ImportError here means: build the extension

    BACKEND = "compiled"
elif _requested == "":
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _reference
        BACKEND = "pure"
else:
    raise ImportError(
        f"NOTCHCAST_BACKEND must be 'pure' or 'compiled', got {_requested!r}"
    )

forward_batch = _impl.forward_batch
backward_batch = _impl.backward_batch
