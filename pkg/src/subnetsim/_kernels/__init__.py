"""Hot-loop kernels with a compiled (Cython) backend and a numpy fallback.

The compiled module is used when it imports; set ``SUBNETSIM_BACKEND=python``
to force the fallback. Both expose ``large_scale_gains``, ``ap_interference``
and ``zf_powers`` with identical signatures.
"""

import os

from . import _pykernels

BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: best available)."""
    if name is None:
        name = os.environ.get("SUBNETSIM_BACKEND", "").strip().lower() or None
    if name is None:
        return _ckernels if _ckernels is not None else _pykernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def backend_name(module) -> str:
    return "cython" if module is _ckernels and module is not None else "python"


kernels = get_backend()
BACKEND = backend_name(kernels)
