"""Backend selection for the hot numeric kernels.

The compiled Cython core is preferred when importable; otherwise the NumPy
implementations are used.  ``GREENPOLAR_BACKEND=python`` or ``=compiled``
forces a choice (forcing the compiled core raises if it is not built).
Both backends expose the same functions with identical semantics.
"""

from __future__ import annotations

import os

from . import _numpy_core

_FORCE = os.environ.get("GREENPOLAR_BACKEND", "auto").lower()

if _FORCE == "python":
    _impl = _numpy_core
    BACKEND = "python"
elif _FORCE == "compiled":
    from . import _fastcore as _impl  # ImportError here is intentional

    BACKEND = "compiled"
else:
    try:
        from . import _fastcore as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy_core
        BACKEND = "python"

riesz_sum = _impl.riesz_sum
spacetime_heat_sum = _impl.spacetime_heat_sum
spacetime_cauchy_sum = _impl.spacetime_cauchy_sum
metric_ball_mask = _impl.metric_ball_mask
box_mask = _impl.box_mask
heat_ball_mask = _impl.heat_ball_mask
cylinder_mask = _impl.cylinder_mask


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _fastcore  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
