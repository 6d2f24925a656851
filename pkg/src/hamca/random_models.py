"""Seeded random Hamiltonians and initial data for sweeps.

All randomness comes from ``make_rng(seed, *key)``: a counter-based Philox
stream per (seed, key) so parallel tasks draw independent, reproducible numbers
regardless of scheduling.
"""

from __future__ import annotations

import numpy as np

from .exact_core import GaussMatrix, GaussVector, HamiltonianSpec, split_hamiltonian

_EDGE_WEIGHTS = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]


def make_rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def random_gauss_vector(rng: np.random.Generator, dim: int, bound: int = 3) -> GaussVector:
    r = [int(v) for v in rng.integers(-bound, bound + 1, size=dim)]
    i = [int(v) for v in rng.integers(-bound, bound + 1, size=dim)]
    return GaussVector(r, i)


def random_gauss_matrix(rng: np.random.Generator, dim: int, bound: int = 3) -> GaussMatrix:
    r = rng.integers(-bound, bound + 1, size=(dim, dim)).tolist()
    i = rng.integers(-bound, bound + 1, size=(dim, dim)).tolist()
    return GaussMatrix(r, i)


def random_self_adjoint(rng: np.random.Generator, dim: int, bound: int = 3) -> GaussMatrix:
    A = random_gauss_matrix(rng, dim, bound)
    return A + A.dagger()


def spectral_radius(H: GaussMatrix) -> float:
    if H.dim == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(H.to_complex()))))


def _sparse_candidate(rng: np.random.Generator, dim: int, with_diagonal: bool) -> GaussMatrix:
    """Union of paths/cycles with Gaussian-unit-ish edge weights on a shuffled vertex set."""
    re = np.zeros((dim, dim), dtype=object)
    im = np.zeros((dim, dim), dtype=object)
    order = [int(v) for v in rng.permutation(dim)]
    pos = 0
    while pos < dim:
        L = int(rng.integers(1, dim - pos + 1))
        chain = order[pos:pos + L]
        pos += L
        edges = list(zip(chain, chain[1:]))
        if L >= 3 and rng.random() < 0.3:
            edges.append((chain[-1], chain[0]))
        for a, b in edges:
            wr, wi = _EDGE_WEIGHTS[int(rng.integers(0, 4 if rng.random() < 0.8 else 8))]
            re[a, b], im[a, b] = wr, wi
            re[b, a], im[b, a] = wr, -wi
    if with_diagonal:
        for a in range(dim):
            if rng.random() < 0.3:
                re[a, a] = int(rng.integers(-1, 2))
    return GaussMatrix(re, im)


def random_admissible(rng: np.random.Generator, dim: int, strict: bool = True,
                      margin: float = 1e-2, attempts: int = 200) -> HamiltonianSpec:
    """Self-adjoint Gaussian-integer H with every eigenvalue in [-2, 2].

    With ``strict`` all eigenvalues satisfy |lambda| <= 2 - margin.
    """
    limit = 2.0 - margin if strict else 2.0 + 1e-9
    for k in range(attempts):
        H = _sparse_candidate(rng, dim, with_diagonal=k < attempts // 2)
        if spectral_radius(H) <= limit:
            return split_hamiltonian(H)
    # a path graph always qualifies: eigenvalues 2 cos(pi j / (dim + 1))
    re = np.zeros((dim, dim), dtype=object)
    for a in range(dim - 1):
        re[a, a + 1] = re[a + 1, a] = 1
    return split_hamiltonian(GaussMatrix(re))
