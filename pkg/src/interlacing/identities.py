"""Numeric checks of classical determinant identities.

Each function returns ``(deviation, scale)`` so callers can test
``deviation <= tol * scale`` with their own tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mixedchar import RandomVectorSpec, jameslee_identity_check
from .mpoly import _interp_matrix


def _random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def _random_psd(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    return g @ g.conj().T


def rank1_update(a: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """``det(A + v v^*)`` against ``det(A) (1 + v^* A^{-1} v)``."""
    lhs = np.linalg.det(a + np.outer(v, v.conj()))
    det_a = np.linalg.det(a)
    rhs = det_a * (1 + np.vdot(v, np.linalg.solve(a, v)))
    return float(abs(lhs - rhs)), float(abs(det_a) * (1 + np.vdot(v, v).real))


def jacobi(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """``d/dt det(A + tB)`` at 0 against ``det(A) trace(A^{-1} B)``.

    ``det(A + tB)`` is a polynomial of degree ``d`` in ``t``; its linear
    coefficient is recovered exactly by interpolation at ``t = 0..d``.
    """
    d = a.shape[0]
    samples = np.array([np.linalg.det(a + t * b) for t in range(d + 1)])
    deriv = (_interp_matrix(d) @ samples)[1]
    rhs = np.linalg.det(a) * np.trace(np.linalg.solve(a, b))
    scale = abs(np.linalg.det(a)) * float(np.sum(np.abs(np.linalg.solve(a, b)))) + 1e-300
    return float(abs(deriv - rhs)), scale


def jacobi_finite_difference(a: np.ndarray, b: np.ndarray, h: float = 1e-5) -> float:
    """Relative error of the central difference estimate of Jacobi's formula."""
    fd = (np.linalg.det(a + h * b) - np.linalg.det(a - h * b)) / (2 * h)
    rhs = np.linalg.det(a) * np.trace(np.linalg.solve(a, b))
    return float(abs(fd - rhs) / max(abs(rhs), 1e-300))


def trace_product(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Negative part of ``trace(AB)`` for PSD ``A, B`` (zero when the identity holds)."""
    t = np.trace(a @ b).real
    return float(max(-t, 0.0)), float(np.linalg.norm(a) * np.linalg.norm(b))


def expected_rank1(a: np.ndarray, spec: RandomVectorSpec) -> tuple[float, float]:
    """``E det(A - v v^*) = (1 - d/dt) det(A + t E[v v^*])`` at ``t = 0``."""
    dev = jameslee_identity_check(a, spec)
    scale = abs(np.linalg.det(a)) + sum(
        p * abs(np.linalg.det(a - np.outer(w, w.conj()))) for w, p in spec.atoms()
    )
    scale *= 1 + float(np.max(np.sum(np.abs(spec.values) ** 2, axis=1)))
    return dev, float(scale)


@dataclass
class IdentityResult:
    name: str
    worst_ratio: float
    trials: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.worst_ratio <= self.tol

    @property
    def slack(self) -> float:
        return self.tol - self.worst_ratio


def identity_suite(trials: int = 200, seed: int = 0, tol: float = 1e-8, max_dim: int = 5) -> list[IdentityResult]:
    """Run every identity on ``trials`` seeded random instances."""
    rng = np.random.default_rng(seed)
    worst = {"rank1-update": 0.0, "jacobi": 0.0, "trace-positivity": 0.0, "expected-rank1": 0.0}
    for _ in range(trials):
        d = int(rng.integers(1, max_dim + 1))
        a = _random_hermitian(rng, d) + 0.5 * np.eye(d)
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        dev, sc = rank1_update(a, v)
        worst["rank1-update"] = max(worst["rank1-update"], dev / sc)
        dev, sc = jacobi(a, _random_hermitian(rng, d))
        worst["jacobi"] = max(worst["jacobi"], dev / sc)
        p, q = _random_psd(rng, d, int(rng.integers(1, d + 1))), _random_psd(rng, d)
        dev, sc = trace_product(p, q)
        worst["trace-positivity"] = max(worst["trace-positivity"], dev / sc)
        k = int(rng.integers(1, 4))
        vals = rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))
        spec = RandomVectorSpec(vals, rng.dirichlet(np.ones(k)))
        dev, sc = expected_rank1(a, spec)
        worst["expected-rank1"] = max(worst["expected-rank1"], dev / sc)
    return [IdentityResult(name, float(w), trials, tol) for name, w in worst.items()]
