"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
``TPLQ_PURE_PYTHON=1`` is set, the pure-Python implementation is used.
"""
import os

if os.environ.get("TPLQ_PURE_PYTHON", "") not in ("", "0"):
    from ._kernel_py import accumulate_dense, pair_sup

    BACKEND = "python"
else:
    try:
        from ._kernel import accumulate_dense, pair_sup

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._kernel_py import accumulate_dense, pair_sup

        BACKEND = "python"

__all__ = ["BACKEND", "accumulate_dense", "pair_sup"]
