"""Parameter scans over (a, V) grids with per-point necessity cross-checks."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .disc import make_disc
from .errors import InputError, InternalInconsistency, SingularLeviDirection, SolverFail
from .io import vector_from_config
from .jets import center_jacobian, jet_map_jacobian
from .minimality import is_defective
from .quadric import Quadric

log = logging.getLogger(__name__)


@dataclass
class ScanResult:
    grid: dict
    records: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        done = [r for r in self.records if r["error"] is None]
        return {
            "points": len(self.records),
            "completed": len(done),
            "failed": len(self.records) - len(done),
            "nondefective": sum(not r["defective"] for r in done),
            "jet_diffeo": sum(r["jet_invertible"] for r in done),
            "center_diffeo": sum(r["center_invertible"] for r in done),
            "violations": sum(not r["consistent"] for r in done),
        }


def _axis(spec) -> np.ndarray:
    if spec is None:
        return np.zeros(1)
    if not (isinstance(spec, list) and len(spec) == 3):
        raise InputError(f"axis must be [lo, hi, count], got {spec!r}")
    lo, hi, count = spec
    if not isinstance(count, int) or count < 0:
        raise InputError("axis count must be a nonnegative integer")
    return np.linspace(float(lo), float(hi), count)


def _component_values(spec: dict) -> np.ndarray:
    re, im = _axis(spec.get("re")), _axis(spec.get("im"))
    return np.array([x + 1j * y for x in re for y in im], dtype=complex)


def grid_points(grid: dict, n: int, d: int):
    """Row-major list of (a, V): a varies slowest, then V; components left to right.

    Each of ``grid["a"]`` and ``grid["V"]`` is either ``{"fixed": vector}`` or
    ``{"re": [lo, hi, count], "im": [lo, hi, count]}`` applied to every
    component (a missing axis means the single value 0). Points with
    ``max |a_j| > grid["a_max"]`` are dropped.
    """
    def vectors(key, length):
        spec = grid.get(key, {})
        if not isinstance(spec, dict):
            raise InputError(f"grid[{key!r}] must be an object")
        if "fixed" in spec:
            return [vector_from_config(spec["fixed"], length)]
        vals = _component_values(spec)
        return [np.array(c, dtype=complex) for c in itertools.product(vals, repeat=length)]

    a_max = grid.get("a_max")
    pts = []
    for a in vectors("a", d):
        if a_max is not None and np.max(np.abs(a)) > float(a_max):
            continue
        for V in vectors("V", n):
            pts.append((a, V))
    return pts


def scan(q: Quadric, b0, grid: dict) -> ScanResult:
    """Evaluate both Jacobian criteria, minimality and defect at every grid point.

    Solver failures are recorded per point. A point where the 1-jet criterion
    is invertible but minimality fails contradicts the necessity result, so the
    scan aborts with InternalInconsistency.
    """
    result = ScanResult(grid=grid)
    for a, V in grid_points(grid, q.n, q.d):
        rec = {"a": a, "V": V, "error": None}
        try:
            disc = make_disc(q, a, b0, V)
            jet = jet_map_jacobian(q, a, b0, V)
            center = center_jacobian(q, a, b0, V)
            defect = is_defective(disc)
        except (SolverFail, SingularLeviDirection) as exc:
            rec["error"] = f"{type(exc).__name__}: {exc}"
            result.records.append(rec)
            continue
        minimal = defect.certificate.minimal
        rec.update({
            "jet_sigma_min": jet.sigma_min,
            "jet_invertible": jet.invertible,
            "center_sigma_min": center.sigma_min,
            "center_invertible": center.invertible,
            "minimal": minimal,
            "defective": defect.defective,
            "consistent": not (jet.invertible and not minimal),
        })
        result.records.append(rec)
        if not rec["consistent"]:
            raise InternalInconsistency(
                f"invertible 1-jet criterion without stationary minimality at a={a}, V={V}")
    log.info("scan: %s", result.summary)
    return result
