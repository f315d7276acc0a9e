"""Selects the compiled kernels when available.

Set ``BMCOMPLEX_PURE_PYTHON=1`` to force the Python implementations.
"""

import os

from . import _pykernels

if os.environ.get("BMCOMPLEX_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
rank_mod_p = _impl.rank_mod_p
unit_pivot_reduce = _impl.unit_pivot_reduce
product_is_zero_mod_p = _impl.product_is_zero_mod_p
