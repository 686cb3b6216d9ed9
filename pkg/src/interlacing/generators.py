"""Seeded random instances for tests, scripts and the CLI."""

from __future__ import annotations

import numpy as np

from .hermitian import apply_function
from .mixedchar import RandomVectorSpec, covariance


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = complex_normal(rng, (d, d))
    return (g + g.conj().T) / 2


def random_psd(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    g = complex_normal(rng, (d, d if rank is None else rank))
    return g @ g.conj().T


def random_specs(
    rng: np.random.Generator, m: int, d: int, max_support: int = 3, real: bool = False
) -> list[RandomVectorSpec]:
    out = []
    for _ in range(m):
        k = int(rng.integers(1, max_support + 1))
        vals = rng.standard_normal((k, d)) if real else complex_normal(rng, (k, d))
        out.append(RandomVectorSpec(vals, rng.dirichlet(np.ones(k))))
    return out


def isotropic_covariances(rng: np.random.Generator, m: int, d: int, rank: int = 2) -> list[np.ndarray]:
    """PSD ``A_1..A_m`` with ``sum A_i = I``, obtained by whitening random PSD matrices."""
    if m * min(rank, d) < d:
        raise ValueError("m * rank must be at least d for the sum to be invertible")
    mats = [random_psd(rng, d, min(rank, d)) for _ in range(m)]
    s = sum(mats)
    w = apply_function(s, lambda lam: lam**-0.5)
    out = [w @ a @ w for a in mats]
    return [(a + a.conj().T) / 2 for a in out]


def isotropic_specs(
    rng: np.random.Generator, m: int, d: int, max_support: int = 3
) -> list[RandomVectorSpec]:
    """Random vectors whose covariances sum to the identity."""
    specs = random_specs(rng, m, d, max_support)
    s = sum(covariance(sp) for sp in specs)
    w = apply_function(s, lambda lam: lam**-0.5)
    return [RandomVectorSpec(sp.values @ w.T, sp.probs) for sp in specs]


def parseval_frame(rng: np.random.Generator, m: int, d: int) -> list[np.ndarray]:
    """``m`` vectors in ``C^d`` with ``sum u_i u_i^* = I`` (rows of an isometry)."""
    q, _ = np.linalg.qr(complex_normal(rng, (m, d)))
    return [q[i].conj() for i in range(m)]


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_normal(rng, (d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def weaver_instance(rng: np.random.Generator, eta: int, d: int) -> list[np.ndarray]:
    """Union of ``eta`` random orthonormal bases: unit vectors with ``sum w w^* = eta I``."""
    out = []
    for _ in range(eta):
        u = random_unitary(rng, d)
        out.extend(u[:, k] for k in range(d))
    return out


def weaver_scalar_instance(rng: np.random.Generator, eta: float, m: int) -> list[np.ndarray]:
    """``m`` equal-length scalars with random phases and ``sum |w|^2 = eta`` (needs ``m >= eta``)."""
    mag = np.sqrt(eta / m)
    phases = np.exp(2j * np.pi * rng.random(m))
    return [np.array([mag * p]) for p in phases]


def zero_diagonal_hermitian(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    t = rng.standard_normal((n, n)) if real else complex_normal(rng, (n, n))
    t = (t + t.conj().T) / 2
    np.fill_diagonal(t, 0.0)
    return t
