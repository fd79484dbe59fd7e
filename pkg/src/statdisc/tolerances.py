"""Default tolerances and the relative ``scale`` used throughout.

All thresholds are relative: a check against ``tol`` compares with
``tol * scale(*operands)`` where ``scale = 1 + max max-norm of the operands``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

HERMITIAN_TOL = 1e-12
INVERTIBILITY_TOL = 1e-10
RESIDUAL_TOL = 1e-12
STEP_TOL = 1e-14
STEIN_TOL = 1e-11
SERIES_TOL = 1e-16
BOUNDARY_TOL = 1e-10
PINNING_TOL = 1e-12
ATTACHMENT_TOL = 1e-10
HOLOMORPHY_TOL = 1e-8
WITNESS_TOL = 1e-9
NORM_MARGIN = 1e-6
MAX_ITER = 10000


def scale(*operands) -> float:
    """1 + the largest entry modulus over all operands (scalars, vectors, matrices)."""
    m = 0.0
    for op in operands:
        arr = np.asarray(op)
        if arr.size:
            m = max(m, float(np.max(np.abs(arr))))
    return 1.0 + m


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = HERMITIAN_TOL
    invertibility: float = INVERTIBILITY_TOL
    residual: float = RESIDUAL_TOL
    stein: float = STEIN_TOL
    boundary: float = BOUNDARY_TOL
    pinning: float = PINNING_TOL
    attachment: float = ATTACHMENT_TOL
    holomorphy: float = HOLOMORPHY_TOL
    witness: float = WITNESS_TOL
    norm_margin: float = NORM_MARGIN

    def override(self, **kwargs) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            raise KeyError(", ".join(sorted(unknown)))
        return replace(self, **{k: float(v) for k, v in kwargs.items()})

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
