"""Orbit spaces, stationary minimality certificates and the defect of discs.

Stationary minimality at (a, b, V) asks that A_1..A_d, restricted to the real
orbit space span_R{X^r V}, be R-linearly independent. Two independent routes
decide it:

* rank: the real matrix stacking Re/Im parts of the columns A_j X^r V,
  r = 0..2n-1, has trivial kernel;
* Gram: ``G_js = Re V^* psi^{-1}(A_j A_s) V`` is positive definite.

Since ``G = Re(sum_r D_r^* D_r)`` the squared singular values of the stacked
matrix underestimate the Gram eigenvalues, so both verdicts use the same
threshold on the quadratic scale (sigma^2 against the Gram tolerance).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .disc import StationaryDisc, eval_disc, fourier_coefficients, make_disc, roots_of_unity
from .errors import InternalInconsistency, PreconditionError, SolverFail, SingularLeviDirection
from .pencil import factorize, solve_quadratic, stein_solve
from .quadric import Quadric
from .tolerances import INVERTIBILITY_TOL, WITNESS_TOL, scale

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrbitBasis:
    vectors: np.ndarray  # (2n, n): row r is X^r V
    real_dimension: int


@dataclass(frozen=True)
class MinimalityCertificate:
    minimal: bool
    gram: np.ndarray
    gram_min_eigenvalue: float
    rank_sigma_min: float
    threshold: float
    kernel_witness: Optional[np.ndarray] = None

    @property
    def verdict(self) -> bool:
        return self.minimal


@dataclass(frozen=True)
class DefectReport:
    defective: bool
    certificate: MinimalityCertificate
    witness: Optional[np.ndarray] = None
    boundary_residual: Optional[float] = None
    fourier_max: Optional[float] = None
    threshold: Optional[float] = None


@dataclass(frozen=True)
class Equivalences:
    nondefective: bool
    minimal_h0: bool
    minimal_dh0: bool
    minimal_dh1: bool

    @property
    def agree(self) -> bool:
        return len({self.nondefective, self.minimal_h0, self.minimal_dh0, self.minimal_dh1}) == 1


@dataclass(frozen=True)
class OpennessResult:
    probes: int
    minimal: int
    failed: int

    @property
    def fraction(self) -> float:
        ok = self.probes - self.failed
        return self.minimal / ok if ok else float("nan")


def _realify(vectors: np.ndarray) -> np.ndarray:
    """Stack real and imaginary parts along axis -2 (complex rows -> twice as many real rows)."""
    return np.concatenate([vectors.real, vectors.imag], axis=-2)


def krylov(X, V, count: Optional[int] = None) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    V = np.asarray(V, dtype=complex)
    count = 2 * X.shape[0] if count is None else count
    out = np.empty((count, V.shape[0]), dtype=complex)
    v = V
    for r in range(count):
        out[r] = v
        v = X @ v
    return out


def orbit_basis(X, V, tol: float = INVERTIBILITY_TOL) -> OrbitBasis:
    """Vectors X^r V, r = 0..2n-1, and the real dimension of their span.

    The dimension comes from a real Arnoldi process on R^(2n) (X acts
    R-linearly), which stabilizes within 2n steps. A new direction counts when
    its component orthogonal to the current span exceeds ``tol * ||X||_2``
    times the norm of the vector it came from, so geometric decay of X^r V
    does not hide directions.
    """
    X = np.asarray(X, dtype=complex)
    vecs = krylov(X, V)
    n = X.shape[0]
    # real 2n x 2n matrix of v -> X v on (Re v, Im v)
    XR = np.block([[X.real, -X.imag], [X.imag, X.real]])
    v0 = np.concatenate([vecs[0].real, vecs[0].imag])
    if np.linalg.norm(v0) <= tol * scale(V):
        return OrbitBasis(vectors=vecs, real_dimension=0)
    basis = [v0 / np.linalg.norm(v0)]
    cut = tol * max(np.linalg.norm(XR, 2), np.finfo(float).tiny)
    while len(basis) < 2 * n:
        w = XR @ basis[-1]
        Q = np.array(basis).T
        for _ in range(2):
            w = w - Q @ (Q.T @ w)
        nw = np.linalg.norm(w)
        if nw <= cut:
            break
        basis.append(w / nw)
    return OrbitBasis(vectors=vecs, real_dimension=len(basis))


def stacked_orbit_matrix(q: Quadric, X, V) -> np.ndarray:
    """Real (2n * 2n) x d matrix whose column j stacks Re/Im of A_j X^r V for r < 2n."""
    vecs = krylov(X, V)  # (2n, n)
    cols = np.einsum("jik,rk->jri", q.A, vecs).reshape(q.d, -1)  # (d, 2n*n)
    return np.concatenate([cols.real, cols.imag], axis=1).T


def gram_matrix(q: Quadric, X, V) -> np.ndarray:
    """``Re V^* psi^{-1}(A_j A_s) V``, symmetrized."""
    V = np.asarray(V, dtype=complex)
    prods = np.einsum("jik,skl->jsil", q.A, q.A)
    S = stein_solve(prods, X)
    G = np.einsum("i,jsil,l->js", V.conj(), S, V).real
    return 0.5 * (G + G.T)


def _normalize_witness(lam):
    lam = lam / np.linalg.norm(lam)
    k = int(np.argmax(np.abs(lam) > 1e-12))
    return -lam if lam[k] < 0 else lam


def is_stationary_minimal(q: Quadric, X, V, tol: float = INVERTIBILITY_TOL,
                          witness_tol: float = WITNESS_TOL) -> MinimalityCertificate:
    """Decide stationary minimality by the Gram and rank criteria; they must agree."""
    X = np.asarray(X, dtype=complex)
    V = np.asarray(V, dtype=complex)
    G = gram_matrix(q, X, V)
    evals = np.linalg.eigvalsh(G)
    gmin = float(evals[0])
    thr = tol * scale(G)
    gram_ok = gmin > thr

    R = stacked_orbit_matrix(q, X, V)
    _, sv, vt = np.linalg.svd(R, full_matrices=False)
    smin = float(sv[-1])
    rank_ok = smin ** 2 > thr
    if gram_ok != rank_ok:
        raise InternalInconsistency(
            f"Gram criterion ({gmin:.3e}) and rank criterion ({smin ** 2:.3e}) disagree "
            f"against threshold {thr:.3e}")
    witness = None
    if not gram_ok:
        witness = _normalize_witness(vt[-1])
        resid = float(np.max(np.abs(R @ witness), initial=0.0))
        if resid > witness_tol * scale(q.A) * scale(V):
            raise InternalInconsistency(f"kernel witness leaves residual {resid:.3e}")
    return MinimalityCertificate(minimal=gram_ok, gram=G, gram_min_eigenvalue=gmin,
                                 rank_sigma_min=smin, threshold=thr, kernel_witness=witness)


def is_minimal_at(q: Quadric, a, b, V, **kwargs) -> MinimalityCertificate:
    """Minimality at the coefficient pair (a, b) (b given directly, not via b0)."""
    X, _ = solve_quadratic(q, a, b)
    return is_stationary_minimal(q, X, V, **kwargs)


def is_defective(disc: StationaryDisc, samples: int = 64,
                 witness_tol: float = WITNESS_TOL) -> DefectReport:
    """Defect test: defective iff not stationary minimal at (a, b0 - a - conj(a), h(0)).

    When defective, the witness lift (h, g, 0, zeta lambda/2) is materialized
    and ``h(zeta)^* sum lambda_j A_j`` is checked to vanish on the boundary,
    both pointwise and in every Fourier mode.
    """
    h0, _ = eval_disc(disc, 0.0)
    cert = is_stationary_minimal(disc.q, disc.X, h0)
    if cert.minimal:
        return DefectReport(defective=False, certificate=cert)
    lam = cert.kernel_witness
    z = roots_of_unity(samples)
    h, _ = eval_disc(disc, z)
    values = h.conj() @ disc.q.combination(lam)
    resid = float(np.max(np.abs(values)))
    four = float(np.max(np.abs(fourier_coefficients(values))))
    thr = witness_tol * scale(disc.q.A) * scale(h)
    if resid > thr or four > thr:
        raise InternalInconsistency(f"defect witness does not vanish on the boundary ({resid:.3e})")
    return DefectReport(defective=True, certificate=cert, witness=lam,
                        boundary_residual=resid, fourier_max=four, threshold=thr)


def witness_lift(disc: StationaryDisc, lam, zetas):
    """The defect lift (h, g, 0, zeta*lambda/2) sampled at an array of points."""
    z = np.atleast_1d(np.asarray(zetas, dtype=complex))
    h, g = eval_disc(disc, z)
    gt = 0.5 * z[:, None] * np.asarray(lam, dtype=float)[None]
    return h, g, np.zeros_like(h), gt


def minimality_equivalences(q: Quadric, a, b0, V) -> Equivalences:
    """Nondefectiveness and minimality at h(0) = V, h'(0) = -(I-X)V and h'(1) = -(I-X)^{-1}V."""
    disc = make_disc(q, a, b0, V)
    X = disc.X
    V = disc.V
    IX = np.eye(q.n) - X
    eq = Equivalences(
        nondefective=not is_defective(disc).defective,
        minimal_h0=is_stationary_minimal(q, X, V).minimal,
        minimal_dh0=is_stationary_minimal(q, X, -IX @ V).minimal,
        minimal_dh1=is_stationary_minimal(q, X, -np.linalg.solve(IX, V)).minimal,
    )
    if not eq.agree:
        raise InternalInconsistency(f"minimality equivalences disagree: {eq}")
    return eq


def _ball(rng, dim, radius):
    v = rng.standard_normal(dim)
    nv = np.linalg.norm(v)
    if nv == 0 or radius == 0:
        return np.zeros(dim)
    return v / nv * radius * rng.random() ** (1.0 / dim)


def openness_probe(q: Quadric, a, b0, V, radius: float, probes: int = 50,
                   rng_seed: int = 0) -> OpennessResult:
    """Perturb (a, b0) uniformly in a ball and count how often minimality survives.

    Probe k draws from its own generator seeded by (rng_seed, k), so results do
    not depend on evaluation order.
    """
    a = np.asarray(a, dtype=complex)
    b0 = np.asarray(b0, dtype=float)
    V = np.asarray(V, dtype=complex)
    X0 = factorize(q, a, b0, check=False).X
    if not is_stationary_minimal(q, X0, V).minimal:
        raise PreconditionError("openness probe requires a stationary minimal starting point")
    d = q.d
    n_min = n_fail = 0
    for k in range(probes):
        rng = np.random.default_rng([rng_seed, k])
        delta = _ball(rng, 3 * d, radius)
        ap = a + delta[:d] + 1j * delta[d:2 * d]
        bp = b0 + delta[2 * d:]
        try:
            X = factorize(q, ap, bp, check=False).X
        except (SolverFail, SingularLeviDirection) as exc:
            log.info("openness probe %d failed: %s", k, exc)
            n_fail += 1
            continue
        n_min += is_stationary_minimal(q, X, V).minimal
    return OpennessResult(probes=probes, minimal=int(n_min), failed=n_fail)
