"""1-jet map at zeta = 1, center evaluation map at zeta = 0, and their Jacobian criteria.

The 1-jet map is used in the normalized chart

    (a, V) -> (V, V^*(I - X^*) K_j (I - X) V, Im a)

whose differential is invertible iff the real d×d matrix of derivatives of the
middle block in ``Re a_s`` is. The center map is ``(a, V) -> (V, 2 V^* K_j (I - X) V)``.
Indices j, s are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disc import StationaryDisc, eval_disc, lift_gtilde
from .minimality import MinimalityCertificate, is_stationary_minimal
from .pencil import PencilFactorization, ctranspose, dX_from_factorization, factorize, hermitian_part, stein_solve
from .quadric import Quadric
from .reports import JacobianReport, invertibility_report
from .tolerances import INVERTIBILITY_TOL

__all__ = [
    "JacobianReport", "jet1", "jet1_numeric", "jet_map", "jet_quantity", "tortue_derivative",
    "jet_map_jacobian", "center_map", "center_jacobian", "necessity_check", "NecessityVerdict",
]

FD_STEP = 1e-5


def _fd_step(x: float) -> float:
    return FD_STEP * (1.0 + abs(x))


def jet1(disc: StationaryDisc):
    """``(h'(1), g'(1), g~'(1)) = (-(I-X)^{-1} V, -2 V^* K_j V, (b0 - 2i Im a)/2)``.

    h~'(1) is omitted; it equals ``h'(1)^* sum b0_j A_j`` and carries no new information.
    """
    X, K, V = disc.X, disc.fact.K, disc.V
    dh = -np.linalg.solve(np.eye(disc.q.n) - X, V)
    dg = -2.0 * np.einsum("i,jik,k->j", V.conj(), K, V)
    dgt = 0.5 * (disc.params.b0 - 2j * disc.params.a.imag)
    return dh, dg.astype(complex), dgt.astype(complex)


def _radial_values(disc, zeta):
    h, g = eval_disc(disc, zeta)
    return np.concatenate([h, g, lift_gtilde(disc, zeta)])


def jet1_numeric(disc: StationaryDisc, step: float = 1e-5, strict: bool = True):
    """Richardson-extrapolated one-sided difference along the radius zeta = 1 - t.

    ``step`` must lie in [1e-8, 1e-3] unless ``strict=False``.
    """
    if strict and not 1e-8 <= step <= 1e-3:
        raise ValueError("step must lie in [1e-8, 1e-3]")
    f1 = _radial_values(disc, 1.0)

    def diff(t):
        return (f1 - _radial_values(disc, 1.0 - t)) / t

    est = 2.0 * diff(step) - diff(2.0 * step)
    n, d = disc.q.n, disc.q.d
    return est[:n], est[n:n + d], est[n + d:]


def jet_quantity(fact: PencilFactorization, V) -> np.ndarray:
    """``V^*(I - X^*) K_j (I - X) V`` for each j (real)."""
    V = np.asarray(V, dtype=complex)
    W = V - fact.X @ V
    return np.einsum("i,jik,k->j", W.conj(), fact.K, W).real


def jet_map(disc: StationaryDisc):
    """Normalized 1-jet map value ``(V, V^*(I-X^*)K_j(I-X)V, Im a)``."""
    return disc.V.copy(), jet_quantity(disc.fact, disc.V), disc.params.a.imag.copy()


def _tortue(fact: PencilFactorization, dX: np.ndarray, j: int) -> np.ndarray:
    IXh = np.eye(fact.q.n) - ctranspose(fact.X)
    inner = stein_solve(fact.K[j] @ dX, fact.X)
    return -2.0 * hermitian_part(IXh @ IXh @ inner)


def tortue_derivative(q: Quadric, a, b0, s: int, j: int) -> np.ndarray:
    """``d/dRe a_s [(I - X^*) K_j (I - X)] = -2 ((I - X^*)^2 psi^{-1}(K_j dX_s))_H``."""
    fact = factorize(q, a, b0, check=False)
    return _tortue(fact, dX_from_factorization(fact, s), j)


def _is_zero(a) -> bool:
    return not np.any(np.asarray(a) != 0)


def _jet_matrix_fd(q, a, b0, V):
    a = np.asarray(a, dtype=complex)
    J = np.empty((q.d, q.d))
    for s in range(q.d):
        h = _fd_step(a[s].real)
        e = np.zeros(q.d)
        e[s] = h
        plus = jet_quantity(factorize(q, a + e, b0, check=False), V)
        minus = jet_quantity(factorize(q, a - e, b0, check=False), V)
        J[:, s] = (plus - minus) / (2 * h)
    return J


def jet_map_jacobian(q: Quadric, a, b0, V, method: str = "analytic",
                     tol: float = INVERTIBILITY_TOL) -> JacobianReport:
    """Criterion matrix ``(d/dRe a_s V^*(I-X^*)K_j(I-X)V)_{j,s}`` with its verdict.

    ``method="analytic"`` uses ``2 Re(V^* A_j A^{-1} A_s V)`` at a = 0 and the
    Hermitian-part derivative formula elsewhere; ``method="fd"`` uses central
    differences with step ``1e-5 (1 + |Re a_s|)``.
    """
    V = np.asarray(V, dtype=complex)
    if method == "fd":
        return invertibility_report(_jet_matrix_fd(q, a, b0, V), tol)
    if method != "analytic":
        raise ValueError(f"unknown method {method!r}")
    if _is_zero(a):
        AV = q.A @ V  # (d, n)
        S = np.linalg.solve(q.combination(np.asarray(b0, dtype=float)), AV.T)  # (n, d)
        J = 2.0 * (AV.conj() @ S).real
        return invertibility_report(J, tol)
    fact = factorize(q, a, b0, check=False)
    J = np.empty((q.d, q.d))
    for s in range(q.d):
        dX = dX_from_factorization(fact, s)
        for j in range(q.d):
            J[j, s] = (V.conj() @ _tortue(fact, dX, j) @ V).real
    return invertibility_report(J, tol)


def jet_map_full_jacobian(q: Quadric, a, b0, V) -> np.ndarray:
    """Central-difference real Jacobian of the whole normalized 1-jet map.

    Inputs are ordered (Re a_1, Im a_1, ..., Re V_1, Im V_1, ...); outputs are
    (Re V_1, Im V_1, ..., Q_1..Q_d, Im a_1..Im a_d).
    """
    a = np.asarray(a, dtype=complex)
    V = np.asarray(V, dtype=complex)

    def F(x):
        ap = x[0:2 * q.d:2] + 1j * x[1:2 * q.d:2]
        Vp = x[2 * q.d::2] + 1j * x[2 * q.d + 1::2]
        Q = jet_quantity(factorize(q, ap, b0, check=False), Vp)
        return np.concatenate([np.column_stack([Vp.real, Vp.imag]).ravel(), Q, ap.imag])

    x0 = np.concatenate([np.column_stack([a.real, a.imag]).ravel(),
                         np.column_stack([V.real, V.imag]).ravel()])
    return _central_jacobian(F, x0)


def _central_jacobian(F, x0):
    cols = []
    for k in range(x0.size):
        h = _fd_step(x0[k])
        e = np.zeros_like(x0)
        e[k] = h
        cols.append((F(x0 + e) - F(x0 - e)) / (2 * h))
    return np.column_stack(cols)


def center_map(disc: StationaryDisc):
    """``f(0) = (V, 2 V^* K_j (I - X) V)``."""
    V = disc.V
    W = V - disc.X @ V
    return V.copy(), 2.0 * np.einsum("i,jik,k->j", V.conj(), disc.fact.K, W)


def _center_quantity(fact, V):
    W = V - fact.X @ V
    return np.einsum("i,jik,k->j", V.conj(), fact.K, W)


def _realify_columns(dRe, dIm):
    """Interleave complex derivative columns into a real Jacobian (see JacobianReport)."""
    d_out, d_in = dRe.shape
    R = np.empty((2 * d_out, 2 * d_in))
    R[0::2, 0::2] = dRe.real
    R[1::2, 0::2] = dRe.imag
    R[0::2, 1::2] = dIm.real
    R[1::2, 1::2] = dIm.imag
    return R


def center_jacobian(q: Quadric, a, b0, V, method: str = "analytic",
                    tol: float = INVERTIBILITY_TOL) -> JacobianReport:
    """Criterion matrix ``(d/dRe a_s V^* K_j (I - X) V)_{j,s}`` (complex d×d).

    At a = 0 the analytic value is ``V^* A_j (sum b0_k A_k)^{-1} A_s V`` and the
    derivative in ``Im a_s`` is ``-i`` times that in ``Re a_s``. Elsewhere, or
    with ``method="fd"``, both directions come from central differences. The
    realified 2d×2d block is attached to the report.
    """
    V = np.asarray(V, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if method not in ("analytic", "fd"):
        raise ValueError(f"unknown method {method!r}")
    if method == "analytic" and _is_zero(a):
        AV = q.A @ V
        S = np.linalg.solve(q.combination(np.asarray(b0, dtype=float)), AV.T)
        M = AV.conj() @ S
        return invertibility_report(M, tol, realified=_realify_columns(M, -1j * M))
    dRe = np.empty((q.d, q.d), dtype=complex)
    dIm = np.empty((q.d, q.d), dtype=complex)
    for s in range(q.d):
        e = np.zeros(q.d, dtype=complex)
        h = _fd_step(a[s].real)
        e[s] = h
        dRe[:, s] = (_center_quantity(factorize(q, a + e, b0, check=False), V)
                     - _center_quantity(factorize(q, a - e, b0, check=False), V)) / (2 * h)
        h = _fd_step(a[s].imag)
        e[s] = 1j * h
        dIm[:, s] = (_center_quantity(factorize(q, a + e, b0, check=False), V)
                     - _center_quantity(factorize(q, a - e, b0, check=False), V)) / (2 * h)
    return invertibility_report(dRe, tol, realified=_realify_columns(dRe, dIm))


@dataclass(frozen=True)
class NecessityVerdict:
    jet: JacobianReport
    minimality: MinimalityCertificate

    @property
    def consistent(self) -> bool:
        return not (self.jet.invertible and not self.minimality.minimal)

    @property
    def status(self) -> str:
        return "CONSISTENT" if self.consistent else "CONTRADICTION"


def necessity_check(q: Quadric, a, b0, V) -> NecessityVerdict:
    """Cross-check: an invertible 1-jet criterion forces stationary minimality at (a, b0-a-conj(a), V).

    A CONTRADICTION status means an implementation bug, not a mathematical finding.
    """
    X = factorize(q, a, b0, check=False).X
    return NecessityVerdict(jet=jet_map_jacobian(q, a, b0, V),
                            minimality=is_stationary_minimal(q, X, V))
