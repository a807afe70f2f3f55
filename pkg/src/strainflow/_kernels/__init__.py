"""Kernel backend selection: compiled extension if built, NumPy otherwise.

Set ``STRAINFLOW_FORCE_PYTHON=1`` to force the NumPy implementation.
"""

import os

if os.environ.get("STRAINFLOW_FORCE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        from . import _pykernels as _impl

from . import _pykernels as python_backend

BACKEND = _impl.BACKEND
tgv_iterate = _impl.tgv_iterate
