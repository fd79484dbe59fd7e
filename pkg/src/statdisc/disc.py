"""Explicit stationary discs in S_0(Q) and their lifts, with numerical stationarity checks.

For parameters (a, b0, V) with ``b = b0 - a - conj(a)`` the disc is

    h(zeta)   = V - R(zeta),        R(zeta) = zeta (I - zeta X)^{-1} (I - X) V
    g_j(zeta) = V^* A_j V - 2 V^* A_j R + W^* K_j (W + 2 X R) + i y_j,   W = (I - X) V

with ``i y_j = V^* (X^* K_j - K_j X) V`` so that g(1) = 0. The lift is
``h~(zeta) = -zeta h(zeta)^* C(zeta)`` and ``g~(zeta) = (a + b zeta + conj(a) zeta^2) / 2``,
where ``C(zeta) = sum_j (a_j conj(zeta) + b_j + conj(a_j) zeta) A_j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InternalInconsistency, NotOnBoundary, OutsideClosedDisc
from .pencil import PencilFactorization, ctranspose, factorize
from .quadric import Quadric
from .tolerances import ATTACHMENT_TOL, HOLOMORPHY_TOL, PINNING_TOL, scale

_EDGE = 1e-12


@dataclass(frozen=True)
class DiscParameters:
    a: np.ndarray
    b0: np.ndarray
    V: np.ndarray

    @classmethod
    def of(cls, a, b0, V) -> "DiscParameters":
        return cls(np.asarray(a, dtype=complex), np.asarray(b0, dtype=float),
                   np.asarray(V, dtype=complex))


@dataclass(frozen=True, eq=False)
class StationaryDisc:
    q: Quadric
    params: DiscParameters
    fact: PencilFactorization
    iy: np.ndarray

    @property
    def V(self) -> np.ndarray:
        return self.params.V

    @property
    def X(self) -> np.ndarray:
        return self.fact.X


@dataclass(frozen=True)
class Check:
    """Outcome of a numerical verification: a residual against a relative threshold."""

    residual: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class FourierCheck:
    max_negative: float
    max_coefficient: float
    threshold: float
    passed: bool


def build_disc(q: Quadric, p: DiscParameters, **kwargs) -> StationaryDisc:
    V = np.asarray(p.V, dtype=complex)
    if V.shape != (q.n,):
        raise DimensionMismatch(f"V must have length {q.n}")
    fact = factorize(q, p.a, p.b0, **kwargs)
    X, K = fact.X, fact.K
    Vc = V.conj()
    iy = np.array([Vc @ (ctranspose(X) @ Kj - Kj @ X) @ V for Kj in K])
    if np.max(np.abs(iy.real), initial=0.0) > 1e-12 * scale(K, X) * scale(V) ** 2:
        raise InternalInconsistency(f"i*y_j is not purely imaginary: {iy}")
    iy = 1j * iy.imag
    return StationaryDisc(q=q, params=DiscParameters.of(p.a, p.b0, V), fact=fact, iy=iy)


def make_disc(q: Quadric, a, b0, V, **kwargs) -> StationaryDisc:
    return build_disc(q, DiscParameters.of(a, b0, V), **kwargs)


def _resolvent_term(X, V, zetas):
    """R(zeta) = zeta (I - zeta X)^{-1} (I - X) V for each zeta; shape (N, n)."""
    n = X.shape[0]
    W = V - X @ V
    M = np.eye(n)[None] - zetas[:, None, None] * X[None]
    u = np.linalg.solve(M, np.broadcast_to(W, (len(zetas), n))[..., None])[..., 0]
    return zetas[:, None] * u


def _eval(disc: StationaryDisc, zetas):
    X, K, V, A = disc.X, disc.fact.K, disc.V, disc.q.A
    R = _resolvent_term(X, V, zetas)
    h = V[None] - R
    W = V - X @ V
    Vc = V.conj()
    base = np.einsum("i,jik,k->j", Vc, A, V)
    cross = np.einsum("i,jik,Nk->Nj", Vc, A, R)
    WK = np.einsum("i,jik->jk", W.conj(), K)
    quad = (WK @ W)[None] + 2.0 * np.einsum("jk,kl,Nl->Nj", WK, X, R)
    g = base[None] - 2.0 * cross + quad + disc.iy[None]
    return h, g


def _as_zetas(zeta):
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    return z


def eval_disc(disc: StationaryDisc, zeta):
    """Return ``(h(zeta), g(zeta))`` for ``|zeta| <= 1``."""
    z = _as_zetas(zeta)
    if np.any(np.abs(z) > 1.0 + _EDGE):
        raise OutsideClosedDisc("discs are only evaluated on the closed unit disc")
    h, g = _eval(disc, z)
    if np.ndim(zeta) == 0:
        return h[0], g[0]
    return h, g


def _lift_components(disc: StationaryDisc, z, h):
    p = disc.params
    b = disc.fact.b
    c = (p.a[None] * np.conj(z)[:, None] + b[None] + np.conj(p.a)[None] * z[:, None])
    C = np.einsum("Nj,jik->Nik", c, disc.q.A)
    htil = -z[:, None] * np.einsum("Ni,Nik->Nk", h.conj(), C)
    gtil = 0.5 * (p.a[None] + b[None] * z[:, None] + np.conj(p.a)[None] * (z ** 2)[:, None])
    return htil, gtil


def eval_lift(disc: StationaryDisc, zeta):
    """Return ``(h~(zeta), g~(zeta))`` for ``|zeta| = 1``."""
    z = _as_zetas(zeta)
    if np.any(np.abs(np.abs(z) - 1.0) > _EDGE):
        raise NotOnBoundary("the lift is defined by boundary values only")
    h, _ = _eval(disc, z)
    htil, gtil = _lift_components(disc, z, h)
    if np.ndim(zeta) == 0:
        return htil[0], gtil[0]
    return htil, gtil


def lift_gtilde(disc: StationaryDisc, zeta):
    """Holomorphic extension ``(a + b zeta + conj(a) zeta^2) / 2`` of g~, valid on the closed disc."""
    p = disc.params
    return 0.5 * (p.a + disc.fact.b * zeta + np.conj(p.a) * zeta ** 2)


def roots_of_unity(samples: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(samples) / samples)


def sample_boundary(disc: StationaryDisc, samples: int) -> dict:
    """All four lift components at the ``samples``-th roots of unity, keyed by name."""
    z = roots_of_unity(samples)
    h, g = _eval(disc, z)
    htil, gtil = _lift_components(disc, z, h)
    return {"zeta": z, "h": h, "g": g, "htilde": htil, "gtilde": gtil}


def fourier_coefficients(values) -> np.ndarray:
    """Discrete Fourier coefficients along axis 0: entry m is the coefficient of zeta^m (m mod N)."""
    values = np.asarray(values)
    return np.fft.fft(values, axis=0) / values.shape[0]


def negative_coefficients(coeffs) -> np.ndarray:
    """Coefficients of zeta^-1 .. zeta^-(N/2-1); the shared Nyquist bin is excluded."""
    N = coeffs.shape[0]
    return coeffs[N // 2 + 1:]


def verify_attachment(disc: StationaryDisc, samples: int = 256, tol: float = ATTACHMENT_TOL) -> Check:
    """Max over boundary samples and j of ``|Re g_j - h^* A_j h|``."""
    if samples < 8:
        raise ValueError("samples must be at least 8")
    z = roots_of_unity(samples)
    h, g = _eval(disc, z)
    levi = np.einsum("Ni,jik,Nk->Nj", h.conj(), disc.q.A, h).real
    res = float(np.max(np.abs(g.real - levi)))
    thr = tol * scale(h, g, disc.q.A)
    return Check(res, thr, res <= thr)


def verify_lift_holomorphic(disc: StationaryDisc, samples: int = 512,
                            tol: float = HOLOMORPHY_TOL) -> FourierCheck:
    """FFT test that every component of the boundary lift has no negative Fourier modes."""
    if samples < 128 or samples & (samples - 1):
        raise ValueError("samples must be a power of two >= 128")
    data = sample_boundary(disc, samples)
    stacked = np.concatenate([data[k] for k in ("h", "g", "htilde", "gtilde")], axis=1)
    coeffs = fourier_coefficients(stacked)
    neg = float(np.max(np.abs(negative_coefficients(coeffs)), initial=0.0))
    top = float(np.max(np.abs(coeffs), initial=0.0))
    thr = tol * top
    return FourierCheck(neg, top, thr, neg <= thr)


def verify_pinning(disc: StationaryDisc, tol: float = PINNING_TOL) -> Check:
    """Distance of the lift at zeta=1 from (0, 0, 0, b0/2)."""
    h, g = eval_disc(disc, 1.0)
    htil, gtil = eval_lift(disc, 1.0)
    res = float(max(np.max(np.abs(h)), np.max(np.abs(g)), np.max(np.abs(htil)),
                    np.max(np.abs(gtil - disc.params.b0 / 2))))
    thr = tol * scale(disc.fact.K, disc.q.A, disc.X) * scale(disc.V) ** 2
    return Check(res, thr, res <= thr)


def special_family(q: Quadric, b0, V, zeta):
    """The a = 0 lifts ((1-zeta)V, 2(1-zeta)V^*A_jV, (1-zeta)V^* sum b0_j A_j, zeta b0/2)."""
    z = _as_zetas(zeta)
    V = np.asarray(V, dtype=complex)
    b0 = np.asarray(b0, dtype=float)
    w = (1.0 - z)[:, None]
    h = w * V[None]
    g = 2.0 * w * np.einsum("i,jik,k->j", V.conj(), q.A, V)[None]
    htil = w * (V.conj() @ q.combination(b0))[None]
    gtil = 0.5 * z[:, None] * b0[None]
    return h, g, htil, gtil
