"""Quadric models ``Re w_j = z^* A_j z`` and their pointwise nondegeneracy certificates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NoDirectionFound, NonHermitianInput, SingularLeviDirection
from .reports import JacobianReport, invertibility_report
from .tolerances import HERMITIAN_TOL, INVERTIBILITY_TOL, scale


@dataclass(frozen=True, eq=False)
class Quadric:
    """Quadric of CR dimension ``n`` and codimension ``d`` in C^(n+d).

    ``A`` is a read-only complex array of shape (d, n, n) holding the
    Hermitian Levi-form coefficient matrices.
    """

    n: int
    d: int
    A: np.ndarray

    def combination(self, coeffs) -> np.ndarray:
        """Return sum_j coeffs_j A_j (coeffs may be complex)."""
        c = np.asarray(coeffs)
        if c.shape != (self.d,):
            raise DimensionMismatch(f"expected {self.d} coefficients, got shape {c.shape}")
        return np.tensordot(c, self.A, axes=1)

    @property
    def scale(self) -> float:
        return scale(self.A)


@dataclass(frozen=True)
class LeviDirection:
    b0: np.ndarray
    smallest_singular_value: float


def validate_quadric(matrices: Sequence, tol: float = HERMITIAN_TOL) -> Quadric:
    """Validate a list of Levi matrices and return a :class:`Quadric`.

    Matrices within ``tol * scale`` of Hermitian are symmetrized as
    ``(M + M^*)/2``; anything further off is rejected.
    """
    if len(matrices) == 0:
        raise DimensionMismatch("at least one matrix is required")
    mats = []
    for k, m in enumerate(matrices):
        arr = np.array(m, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionMismatch(f"matrix {k} is not square: shape {arr.shape}")
        mats.append(arr)
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise DimensionMismatch("all matrices must have the same size")
    if not all(np.all(np.isfinite(m)) for m in mats):
        raise NonHermitianInput("matrices must be finite")
    A = np.stack(mats)
    dev = np.max(np.abs(A - np.conj(np.swapaxes(A, 1, 2))), axis=(1, 2))
    for k, dk in enumerate(dev):
        if dk > tol * scale(A[k]):
            raise NonHermitianInput(f"matrix {k} deviates from Hermitian by {dk:.3e}")
    A = 0.5 * (A + np.conj(np.swapaxes(A, 1, 2)))
    A.setflags(write=False)
    return Quadric(n=n, d=len(mats), A=A)


def _sigma_min(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def find_levi_direction(q: Quadric, trials: int = 256, rng_seed: int = 0,
                        tol: float = INVERTIBILITY_TOL) -> LeviDirection:
    """Search for a unit ``b0`` making ``sum b0_j A_j`` invertible.

    Candidates are the 2d signed axis directions followed by ``trials``
    Gaussian directions; the one with the largest smallest singular value
    wins (ties keep the earlier candidate). Failure is inconclusive.
    """
    rng = np.random.default_rng(rng_seed)
    eye = np.eye(q.d)
    cands = [s * eye[j] for j in range(q.d) for s in (1.0, -1.0)]
    for _ in range(trials):
        v = rng.standard_normal(q.d)
        nv = np.linalg.norm(v)
        if nv > 0:
            cands.append(v / nv)
    best, best_sigma = cands[0], -1.0
    for b in cands:
        s = _sigma_min(q.combination(b))
        if s > best_sigma:
            best, best_sigma = b, s
    if best_sigma <= tol * q.scale:
        raise NoDirectionFound(
            f"no invertible direction among {len(cands)} candidates "
            f"(best sigma_min={best_sigma:.3e})", best=best, sigma=best_sigma)
    return LeviDirection(b0=np.array(best, dtype=float), smallest_singular_value=best_sigma)


def levi_matrix(q: Quadric, b, tol: float = INVERTIBILITY_TOL) -> np.ndarray:
    """``sum b_j A_j`` for real ``b``, raising SingularLeviDirection if it is not invertible."""
    b = np.asarray(b, dtype=float)
    A = q.combination(b)
    if _sigma_min(A) <= tol * scale(A):
        raise SingularLeviDirection(f"sum b_j A_j is singular for b={b}")
    return A


def _criterion_matrix(q: Quadric, b0, V) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.shape != (q.n,):
        raise DimensionMismatch(f"V must have length {q.n}")
    A = levi_matrix(q, b0)
    D0 = (q.A @ V).T  # column j is A_j V
    return D0.conj().T @ np.linalg.solve(A, D0)


def is_D_nondegenerate(q: Quadric, b0, V, tol: float = INVERTIBILITY_TOL) -> JacobianReport:
    """Report on the real d×d matrix ``Re(D0^* A^{-1} D0)``, D0 having columns ``A_j V``."""
    return invertibility_report(_criterion_matrix(q, b0, V).real, tol)


def is_fully_nondegenerate(q: Quadric, b0, V, tol: float = INVERTIBILITY_TOL) -> JacobianReport:
    """Same as :func:`is_D_nondegenerate` but on the complex matrix ``D0^* A^{-1} D0``."""
    return invertibility_report(_criterion_matrix(q, b0, V), tol)


def evaluate_rho(q: Quadric, z, w) -> np.ndarray:
    """Defining functions ``Re w_j - z^* A_j z``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape != (q.n,) or w.shape != (q.d,):
        raise DimensionMismatch(f"expected z in C^{q.n} and w in C^{q.d}")
    return w.real - np.einsum("i,jik,k->j", z.conj(), q.A, z).real
