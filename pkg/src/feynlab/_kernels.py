"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``FEYNLAB_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

python = _pykernels
compiled = None

if os.environ.get("FEYNLAB_BACKEND", "").lower() != "python":
    try:
        from . import _core as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else _pykernels
BACKEND = active.BACKEND

jacobi_eigh = active.jacobi_eigh
normals = active.normals
markov_paths = active.markov_paths
telegraph = active.telegraph
