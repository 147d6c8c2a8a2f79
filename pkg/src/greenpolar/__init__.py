"""greenpolar: intrinsic Hausdorff-type measures for Green kernels.

Computes covering-based upper bounds for intrinsic (kernel-ball) and
anisotropic Hausdorff-type measures, capacity lower bounds certified by
potential evaluation, and executable forms of the geometric inclusions
between heat balls, parabolic boxes, and space-time cylinders, assembling
polar / semipolar / nonpolar evidence for a catalog of test sets.
"""

from ._core import BACKEND, available_backends

__version__ = "0.1.0"

__all__ = ["BACKEND", "available_backends", "__version__"]
