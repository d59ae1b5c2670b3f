"""Backend selection for the hot kernels.

The compiled extension is used when it imports and ``NILBAL_PURE`` is not
set to a true value; otherwise the numpy fallback in ``_pure`` is used.
Both expose ``coset_enumerate`` and ``rref_sparse_mod_p`` with identical
signatures and results.
"""

import os

from . import _pure
from ._pure import CosetLimitExceeded

_want_pure = os.environ.get("NILBAL_PURE", "").lower() not in ("", "0", "false", "no")

try:
    if _want_pure:
        raise ImportError("pure backend requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _pure
    BACKEND = "pure"

coset_enumerate = _impl.coset_enumerate
rref_sparse_mod_p = _impl.rref_sparse_mod_p

__all__ = ["BACKEND", "CosetLimitExceeded", "coset_enumerate", "rref_sparse_mod_p"]
