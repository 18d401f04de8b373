"""Hot-loop kernels, compiled when available.

``guessbench._ckernels`` (Cython) is preferred; ``guessbench._pykernels``
is the behaviourally identical fallback. Set ``GUESSBENCH_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the implementation in use.
"""
import os

if os.environ.get("GUESSBENCH_PURE_PYTHON", "") not in ("", "0"):
    from guessbench import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from guessbench import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from guessbench import _pykernels as _impl
        BACKEND = "python"

MarkovCellWalker = _impl.MarkovCellWalker
match_batch = _impl.match_batch
permutation = _impl.permutation

__all__ = ["BACKEND", "MarkovCellWalker", "match_batch", "permutation"]
