"""Random admissible instances for property tests, acceptance suites and scripts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadric import Quadric, find_levi_direction, validate_quadric


@dataclass(frozen=True)
class Instance:
    q: Quadric
    a: np.ndarray
    b0: np.ndarray
    V: np.ndarray


def random_hermitian(rng, n: int) -> np.ndarray:
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (G + G.conj().T)


def random_quadric(rng, n: int, d: int) -> Quadric:
    return validate_quadric([random_hermitian(rng, n) for _ in range(d)])


def admissible_a(rng, q: Quadric, b0, ratio: float = 0.1) -> np.ndarray:
    """Random a with ``sum|a_j| * max ||A_j||_2 <= ratio * sigma_min(sum b0_j A_j)``.

    This keeps ``||A^{-1} P||`` and the shift of b well inside the contraction regime.
    """
    sigma = np.linalg.svd(q.combination(np.asarray(b0, dtype=float)), compute_uv=False)[-1]
    norm_A = max(np.linalg.norm(Aj, 2) for Aj in q.A)
    z = rng.standard_normal(q.d) + 1j * rng.standard_normal(q.d)
    radius = ratio * sigma / norm_A * rng.uniform(0.2, 1.0)
    return z / np.sum(np.abs(z)) * radius


def random_instance(rng, n: int | None = None, d: int | None = None,
                    ratio: float = 0.1, zero_a: bool = False) -> Instance:
    n = int(rng.integers(1, 5)) if n is None else n
    d = int(rng.integers(1, 4)) if d is None else d
    q = random_quadric(rng, n, d)
    b0 = find_levi_direction(q, trials=64, rng_seed=int(rng.integers(2**31))).b0
    a = np.zeros(d, dtype=complex) if zero_a else admissible_a(rng, q, b0, ratio)
    V = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return Instance(q, a, b0, V)


def dependent_quadric(rng, n: int) -> Quadric:
    """d = 3 quadric with A_3 = A_1 + A_2: never stationary minimal, whatever X and V."""
    A1, A2 = random_hermitian(rng, n), random_hermitian(rng, n)
    return validate_quadric([A1, A2, A1 + A2])
