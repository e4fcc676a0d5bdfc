"""Pick the kernel implementation once, at import time.

The compiled extension is used when it was built; otherwise the numpy
fallback. Set ``ZEBRA_EVAL_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _purepy

compiled = None
if not os.environ.get("ZEBRA_EVAL_PURE_PYTHON"):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

kernels = compiled if compiled is not None else _purepy
BACKEND = "cython" if compiled is not None else "python"
