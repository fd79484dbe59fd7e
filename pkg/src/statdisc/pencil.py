"""Quadratic matrix equation ``P X^2 + A X + P^* = 0``, Hermitian pencil factorization
and the Stein operator ``psi(M) = M - X^* M X``.

Vectorization is column-major throughout: ``vec(L M R) = (R^T kron L) vec(M)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatch, FactorizationResidual, NormTooLarge, NotConverged,
                     SingularLinearSystem, SpectralRadiusTooLarge)
from .quadric import Quadric, levi_matrix
from .tolerances import DEFAULT, INVERTIBILITY_TOL, MAX_ITER, NORM_MARGIN, SERIES_TOL, STEP_TOL, scale

log = logging.getLogger(__name__)


def ctranspose(M):
    return np.conj(np.swapaxes(M, -1, -2))


def hermitian_part(M) -> np.ndarray:
    """``(M + M^*) / 2``."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + ctranspose(M))


def _vec(M):
    M = np.asarray(M)
    return np.swapaxes(M, -1, -2).reshape(*M.shape[:-2], -1)


def _unvec(v, n):
    v = np.asarray(v)
    return np.swapaxes(v.reshape(*v.shape[:-1], n, n), -1, -2)


def _check_square_pair(M, X):
    M = np.asarray(M, dtype=complex)
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or M.shape[-2:] != X.shape:
        raise DimensionMismatch(f"incompatible shapes {M.shape} and {X.shape}")
    return M, X


def stein_apply(M, X) -> np.ndarray:
    """``psi(M) = M - X^* M X``."""
    M, X = _check_square_pair(M, X)
    return M - ctranspose(X) @ M @ X


def spectral_radius(X) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(X)))) if np.size(X) else 0.0


def stein_solve(M, X) -> np.ndarray:
    """Solve ``S - X^* S X = M`` by a dense (n^2 x n^2) linear solve.

    ``M`` may be a stack of shape (..., n, n); all right-hand sides share one
    solve.
    """
    M, X = _check_square_pair(M, X)
    if spectral_radius(X) >= 1.0:
        raise SpectralRadiusTooLarge("psi is only inverted for spectral radius < 1")
    n = X.shape[0]
    L = np.eye(n * n) - np.kron(X.T, ctranspose(X))
    rhs = _vec(M)
    sol = np.linalg.solve(L, rhs.reshape(-1, n * n).T).T
    return _unvec(sol.reshape(rhs.shape), n)


def stein_series(M, X, tol: float = SERIES_TOL, max_terms: int = 100000) -> np.ndarray:
    """Truncated series ``sum_r (X^*)^r M X^r``; stops once a term's norm is below ``tol * scale``."""
    M, X = _check_square_pair(M, X)
    Xh = ctranspose(X)
    term = M.copy()
    total = M.copy()
    thresh = tol * scale(M, X)
    for _ in range(max_terms):
        term = Xh @ term @ X
        total = total + term
        if np.max(np.abs(term), initial=0.0) < thresh:
            return total
    raise NotConverged("Stein series did not reach its tolerance")


def pencil_value(q: Quadric, a, b, zeta) -> np.ndarray:
    """``sum_j (a_j conj(zeta) + b_j + conj(a_j) zeta) A_j``."""
    a = np.asarray(a, dtype=complex)
    c = a * np.conj(zeta) + np.asarray(b, dtype=float) + np.conj(a) * zeta
    return q.combination(c)


@dataclass(frozen=True, eq=False)
class PencilFactorization:
    """Contractive solution of the quadratic matrix equation and its factorization data.

    ``b = b0 - a - conj(a)``, ``P = sum a_j A_j``, ``A_sum = sum b_j A_j``,
    ``B = A_sum + P X`` and ``K_j = psi^{-1}(A_j)``.
    """

    q: Quadric
    a: np.ndarray
    b0: np.ndarray
    b: np.ndarray
    X: np.ndarray
    B: np.ndarray
    K: np.ndarray
    P: np.ndarray
    A_sum: np.ndarray
    residual: float = 0.0
    iterations: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def norm_X(self) -> float:
        return float(np.linalg.norm(self.X, 2))


def quadratic_residual(P, A, X) -> np.ndarray:
    return P @ X @ X + A @ X + ctranspose(P)


def _sylvester_operator(B, P, X):
    """Matrix of ``E -> B E + P E X`` acting on vec(E)."""
    n = X.shape[0]
    return np.kron(np.eye(n), B) + np.kron(X.T, P)


def _solve_linear(L, rhs, what):
    if not np.all(np.isfinite(L)):
        raise SingularLinearSystem(f"{what}: non-finite operator")
    sv = np.linalg.svd(L, compute_uv=False)
    if sv[-1] <= INVERTIBILITY_TOL * scale(L):
        raise SingularLinearSystem(f"{what}: operator is numerically singular")
    return np.linalg.solve(L, rhs)


def solve_quadratic(q: Quadric, a, b, max_iter: int = MAX_ITER, step_tol: float = STEP_TOL,
                    norm_margin: float = NORM_MARGIN, newton_steps: int = 2):
    """Contractive solution X of ``P X^2 + A X + P^* = 0`` for the coefficient pair (a, b).

    Fixed-point iteration ``X <- -A^{-1}(P X^2 + P^*)`` from X = 0, then up to
    ``newton_steps`` Newton corrections kept only when they lower the residual.
    Returns ``(X, iterations)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=float)
    if a.shape != (q.d,) or b.shape != (q.d,):
        raise DimensionMismatch(f"a and b must have length {q.d}")
    A = levi_matrix(q, b)
    P = q.combination(a)
    n = q.n
    G = np.linalg.solve(A, P)
    H = np.linalg.solve(A, ctranspose(P))
    X = np.zeros((n, n), dtype=complex)
    for k in range(1, max_iter + 1):
        X_new = -(G @ X @ X + H)
        if not np.all(np.isfinite(X_new)) or np.max(np.abs(X_new)) > 1e8:
            raise NotConverged(f"fixed-point iteration diverged at step {k}")
        step = np.linalg.norm(X_new - X)
        X = X_new
        if step <= step_tol * scale(X):
            break
    else:
        raise NotConverged(f"no convergence in {max_iter} iterations (last step {step:.3e})")

    res = np.linalg.norm(quadratic_residual(P, A, X))
    for _ in range(newton_steps):
        if res == 0.0:
            break
        L = _sylvester_operator(A + P @ X, P, X)
        try:
            E = _unvec(np.linalg.solve(L, -_vec(quadratic_residual(P, A, X))), n)
        except np.linalg.LinAlgError:
            break
        X_try = X + E
        res_try = np.linalg.norm(quadratic_residual(P, A, X_try))
        if not res_try < res:
            break
        X, res = X_try, res_try

    nrm = float(np.linalg.norm(X, 2))
    if nrm >= 1.0 - norm_margin:
        raise NormTooLarge(f"||X||_2 = {nrm:.6f} is not below 1 - {norm_margin:g}")
    log.debug("solve_quadratic: %d iterations, residual %.3e, ||X||=%.4f", k, res, nrm)
    return X, k


def real_b(a, b0) -> np.ndarray:
    """``b = b0 - a - conj(a)``, which pins the conormal lift to b0/2 at zeta=1."""
    return np.asarray(b0, dtype=float) - 2.0 * np.asarray(a, dtype=complex).real


def solve_X(q: Quadric, a, b0, **kwargs) -> np.ndarray:
    """Contractive solution for parameters (a, b0), with ``b = b0 - a - conj(a)``."""
    X, _ = solve_quadratic(q, a, real_b(a, b0), **kwargs)
    return X


def boundary_identity_error(fact: PencilFactorization, samples: int = 64) -> float:
    """Max entry error of ``sum c_j(zeta) A_j = (I - conj(zeta) X^*) B (I - zeta X)`` on roots of unity."""
    n = fact.q.n
    eye = np.eye(n)
    err = 0.0
    for zeta in np.exp(2j * np.pi * np.arange(samples) / samples):
        lhs = pencil_value(fact.q, fact.a, fact.b, zeta)
        rhs = (eye - np.conj(zeta) * ctranspose(fact.X)) @ fact.B @ (eye - zeta * fact.X)
        err = max(err, float(np.max(np.abs(lhs - rhs))))
    return err


def factorize(q: Quadric, a, b0, check: bool = True, boundary_samples: int = 64,
              tols=None, **kwargs) -> PencilFactorization:
    """Solve for X and assemble B, K_j; optionally verify every factorization invariant.

    Raises
    ------
    FactorizationResidual
        If any invariant (residual, Hermitian B, psi(K_j) = A_j, boundary identity) fails.
    SingularLinearSystem
        If B is not invertible.
    """
    a = np.asarray(a, dtype=complex)
    b0 = np.asarray(b0, dtype=float)
    if a.shape != (q.d,) or b0.shape != (q.d,):
        raise DimensionMismatch(f"a and b0 must have length {q.d}")
    b = real_b(a, b0)
    X, iters = solve_quadratic(q, a, b, **kwargs)
    P = q.combination(a)
    A_sum = q.combination(b)
    B = A_sum + P @ X
    K = stein_solve(q.A, X)
    res = float(np.linalg.norm(quadratic_residual(P, A_sum, X)))
    fact = PencilFactorization(q=q, a=a, b0=b0, b=b, X=X, B=B, K=K, P=P, A_sum=A_sum,
                               residual=res, iterations=iters)
    if check:
        diag = check_factorization(fact, boundary_samples, tols)
        fact.diagnostics.update(diag)
    return fact


def check_factorization(fact: PencilFactorization, boundary_samples: int = 64, tols=None) -> dict:
    """Verify every factorization invariant; ``tols`` is a :class:`~statdisc.tolerances.Tolerances`."""
    t = DEFAULT if tols is None else tols
    s = scale(fact.P, fact.A_sum, fact.X)
    herm_B = float(np.max(np.abs(fact.B - ctranspose(fact.B))))
    sigma_B = float(np.linalg.svd(fact.B, compute_uv=False)[-1])
    psi_err = float(np.max(np.abs(stein_apply(fact.K, fact.X) - fact.q.A)))
    herm_K = float(np.max(np.abs(fact.K - ctranspose(fact.K))))
    bnd = boundary_identity_error(fact, boundary_samples)
    diag = {
        "residual": fact.residual,
        "norm_X": fact.norm_X,
        "hermitian_B": herm_B,
        "sigma_min_B": sigma_B,
        "psi_K_error": psi_err,
        "hermitian_K": herm_K,
        "boundary_identity": bnd,
    }
    if sigma_B <= t.invertibility * scale(fact.B):
        raise SingularLinearSystem("B = A + P X is singular")
    failures = []
    if fact.residual > t.residual * s:
        failures.append(f"residual {fact.residual:.3e}")
    if herm_B > t.hermitian * s:
        failures.append(f"B not Hermitian ({herm_B:.3e})")
    sk = scale(fact.K, fact.X)
    if psi_err > t.stein * sk or herm_K > t.stein * sk:
        failures.append(f"psi(K) != A ({psi_err:.3e}) or K not Hermitian ({herm_K:.3e})")
    if bnd > t.boundary * scale(fact.B, fact.A_sum, fact.P):
        failures.append(f"boundary identity {bnd:.3e}")
    if failures:
        raise FactorizationResidual("; ".join(failures))
    return diag


def dX_from_factorization(fact: PencilFactorization, s: int) -> np.ndarray:
    """``dX / d Re a_s`` from ``B dX + P dX X = -A_s (I - X)^2``."""
    n = fact.q.n
    IX = np.eye(n) - fact.X
    rhs = -fact.q.A[s] @ IX @ IX
    L = _sylvester_operator(fact.B, fact.P, fact.X)
    dX = _unvec(_solve_linear(L, _vec(rhs), "solve_dX"), n)
    return dX


def solve_dX(q: Quadric, a, b0, s: int) -> np.ndarray:
    """Derivative of X with respect to ``Re a_s`` (``s`` is 0-based), with b0 held fixed.

    At ``a = 0`` this equals ``-(sum b0_k A_k)^{-1} A_s``.
    """
    if not 0 <= s < q.d:
        raise DimensionMismatch(f"index s={s} out of range for d={q.d}")
    return dX_from_factorization(factorize(q, a, b0, check=False), s)
