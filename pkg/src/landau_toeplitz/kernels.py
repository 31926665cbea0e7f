"""Backend selection for the numerical kernels.

The compiled extension is used when it is importable; set the environment
variable ``LANDAU_TOEPLITZ_PURE=1`` to force the NumPy implementation.
"""

import os

from ._kernels_py import GL_ORDER, LOG_REL_STOP, QuadratureError, laplace_center

if os.environ.get("LANDAU_TOEPLITZ_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
log_quad = _impl.log_quad
laguerre_eval = _impl.laguerre_eval
sturm_count = _impl.sturm_count
tridiag_eigvalsh = _impl.tridiag_eigvalsh

__all__ = [
    "BACKEND", "GL_ORDER", "LOG_REL_STOP", "QuadratureError", "laplace_center",
    "log_quad", "laguerre_eval", "sturm_count", "tridiag_eigvalsh",
]
