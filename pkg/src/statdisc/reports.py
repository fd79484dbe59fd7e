"""Invertibility reports shared by the nondegeneracy tests and the Jacobians."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .tolerances import INVERTIBILITY_TOL, scale


@dataclass(frozen=True)
class JacobianReport:
    """A square criterion matrix with its singular values and invertibility verdict.

    ``matrix`` is real for the jet criterion and complex for the center
    criterion. ``realified`` optionally carries the real Jacobian of the same
    block with complex coordinates split as interleaved (Re, Im) pairs:
    rows (Re F_1, Im F_1, Re F_2, ...), columns (Re a_1, Im a_1, ...).
    """

    matrix: np.ndarray
    singular_values: np.ndarray
    invertible: bool
    condition_number: float
    threshold: float
    realified: Optional[np.ndarray] = field(default=None)

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1]) if self.singular_values.size else 0.0

    @property
    def verdict(self) -> str:
        return "invertible" if self.invertible else "singular"


def invertibility_report(matrix, tol=INVERTIBILITY_TOL, realified=None) -> JacobianReport:
    m = np.asarray(matrix)
    sv = np.linalg.svd(m, compute_uv=False) if m.size else np.zeros(0)
    threshold = tol * scale(m)
    smin = float(sv[-1]) if sv.size else 0.0
    cond = float(sv[0] / smin) if smin > 0 else float("inf")
    return JacobianReport(
        matrix=m,
        singular_values=sv,
        invertible=bool(smin > threshold),
        condition_number=cond,
        threshold=threshold,
        realified=realified,
    )
