"""Hot-loop kernels: pairwise nonbonded energy/forces and torque projection.

A compiled Cython implementation is preferred when present; otherwise a
vectorized numpy fallback with identical signatures is used. Set
KCMFOLD_PURE_PYTHON=1 to force the fallback. Results are deterministic
within one backend; across backends they agree to roundoff.
"""

import os

from . import _pykernels

if os.environ.get("KCMFOLD_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

nonbonded_energy = _impl.nonbonded_energy
nonbonded_energy_forces = _impl.nonbonded_energy_forces
torque_project = _impl.torque_project


def backend_name() -> str:
    return BACKEND
