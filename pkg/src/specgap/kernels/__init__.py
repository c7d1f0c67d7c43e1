"""Hot loops for the numerical oracles.

The compiled module ``_ckernels`` is used when it was built; otherwise the
pure-Python ``_pykernels`` is imported.  Setting ``SPECGAP_PURE_PYTHON=1``
forces the fallback.  ``BACKEND`` names the active implementation.
"""
import os

if os.environ.get("SPECGAP_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _pykernels as _impl

        BACKEND = "python"

tridiag_count = _impl.tridiag_count
tridiag_bisect = _impl.tridiag_bisect
numerov_nodes = _impl.numerov_nodes
numerov_match = _impl.numerov_match
rk4 = _impl.rk4
crit_extrema = _impl.crit_extrema

__all__ = ["BACKEND", "tridiag_count", "tridiag_bisect", "numerov_nodes", "numerov_match", "rk4", "crit_extrema"]
