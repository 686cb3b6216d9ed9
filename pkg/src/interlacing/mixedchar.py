"""Mixed characteristic polynomials and mixed discriminants.

For PSD matrices ``A_1..A_m`` of size ``D``, the mixed characteristic polynomial

    mu(x) = prod_i (1 - d/dz_i) det(xI + sum_i z_i A_i) |_{z=0}

equals the expected characteristic polynomial of ``sum_i v_i v_i^*`` for any
independent random vectors with ``E[v_i v_i^*] = A_i``.

Because ``det(xI + sum z_i A_i)`` is homogeneous of degree ``D``, the part of
``mu`` multiplying ``x^(D-k)`` only sees the squarefree ``z``-monomials of
degree ``k``. Writing ``p_T(x) = det(xI + sum_{i in T} A_i)`` those are
extracted by

    [x^(D-k)] mu = (-1)^k sum_{|T| <= k} (-1)^(k-|T|) C(m-|T|, k-|T|) [x^(D-k)] p_T

so only subsets of size at most ``min(m, D)`` are ever needed. The subset
sums are further factored over the connected components of the matrices'
joint sparsity pattern, which keeps block-diagonal inputs cheap.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatch,
    InvalidSpec,
    NotPSD,
    SupportTooLarge,
    TooManyVectors,
)
from .hermitian import as_hermitian, as_vector, eigh, rank1
from .mpoly import _interp_matrix
from .upoly import RealPoly, poly_from_roots_batch

PSD_CLIP_TOL = 1e-9
MAX_SUBSETS = 2**20
MAX_OUTCOMES = 10**6


@dataclass(frozen=True)
class RandomVectorSpec:
    """A finitely supported random vector: ``values[j]`` with prob ``probs[j]``."""

    values: np.ndarray
    probs: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=complex))
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if vals.shape[0] != probs.shape[0] or vals.shape[0] < 1:
            raise InvalidSpec("need one probability per atom and at least one atom")
        if vals.shape[1] < 1:
            raise InvalidSpec("atoms must have dimension >= 1")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidSpec("probabilities must be nonnegative and sum to 1")
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(probs))):
            raise InvalidSpec("non-finite atom or probability")
        vals.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "dim", vals.shape[1])

    @classmethod
    def deterministic(cls, v) -> RandomVectorSpec:
        return cls(as_vector(v)[None, :], np.ones(1))

    @classmethod
    def uniform(cls, values) -> RandomVectorSpec:
        vals = np.atleast_2d(np.asarray(values, dtype=complex))
        return cls(vals, np.full(len(vals), 1.0 / len(vals)))

    @property
    def support_size(self) -> int:
        return len(self.probs)

    def atoms(self):
        return zip(self.values, self.probs)


def covariance(spec: RandomVectorSpec) -> np.ndarray:
    """``E[v v^*] = sum_j p_j w_j w_j^*``."""
    w = spec.values
    return (w.T * spec.probs) @ w.conj()


def _clip_psd(a: np.ndarray, tol: float = PSD_CLIP_TOL) -> np.ndarray:
    if not a.size or not np.any(a):
        return a
    lam, u = eigh(a)
    scale = max(abs(lam[0]), abs(lam[-1]))
    if lam[0] < -tol * (1.0 + scale):
        raise NotPSD(f"matrix has eigenvalue {lam[0]:.3e}")
    if lam[0] >= 0:
        return a
    return (u * np.clip(lam, 0.0, None)) @ u.conj().T


def as_covariances(As: Sequence) -> list[np.ndarray]:
    """Validate a covariance list: Hermitian, PSD (up to clipping), one size."""
    mats = [as_hermitian(a) for a in As]
    if mats:
        d = mats[0].shape[0]
        if any(a.shape != (d, d) for a in mats):
            raise DimensionMismatch("all covariance matrices must share one dimension")
    return [_clip_psd(a) for a in mats]


@lru_cache(maxsize=256)
def _combos(n: int, k: int) -> np.ndarray:
    if k > n:
        return np.zeros((0, k), dtype=np.intp)
    if k == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.intp).reshape(-1, k)


def _shifted_charpolys(stack: np.ndarray) -> np.ndarray:
    """Ascending coefficients of ``det(xI + M)`` for a stack of Hermitian ``M``."""
    n = stack.shape[-1]
    lead = stack.shape[:-2]
    flat = stack.reshape(-1, n, n)
    if n == 1:
        out = np.stack([flat[:, 0, 0].real, np.ones(len(flat))], axis=1)
    elif n == 2:
        a, b = flat[:, 0, 0].real, flat[:, 1, 1].real
        off = np.abs(flat[:, 0, 1]) ** 2
        out = np.stack([a * b - off, a + b, np.ones(len(flat))], axis=1)
    else:
        if not np.iscomplexobj(flat) or not np.any(flat.imag):
            flat = flat.real
        lam = np.linalg.eigvalsh(flat)
        out = poly_from_roots_batch(-lam)
    return out.reshape(lead + (n + 1,))


def _blocks(mats: list[np.ndarray]) -> list[np.ndarray]:
    """Connected components of the joint sparsity pattern, as index arrays."""
    d = mats[0].shape[0]
    pattern = np.eye(d, dtype=bool)
    for a in mats:
        pattern |= a != 0
    n_comp, labels = connected_components(pattern, directed=False)
    return [np.flatnonzero(labels == c) for c in range(n_comp)]


def _subset_sums_by_size(mats: list[np.ndarray], max_size: int) -> np.ndarray:
    """``S[j] = sum_{|T| = j} coeffs(det(xI + sum_{i in T} A_i))`` for ``j <= max_size``.

    Returns an array of shape ``(max_size + 1, D + 1)`` of ascending
    coefficients in ``x``.
    """
    m = len(mats)
    d = mats[0].shape[0]
    blocks = _blocks(mats)
    sub = [[a[np.ix_(b, b)] for a in mats] for b in blocks]
    touches = np.array([[bool(np.any(s[i])) for s in sub] for i in range(m)]).reshape(m, len(blocks))
    n_touch = touches.sum(axis=1)
    shared = np.flatnonzero(n_touch >= 2)
    null = int(np.sum(n_touch == 0))
    private = [np.flatnonzero((n_touch == 1) & touches[:, k]) for k in range(len(blocks))]

    total = np.zeros((max_size + 1, d + 1))
    n_shared = len(shared)
    for j_r in range(min(n_shared, max_size) + 1):
        combos = _combos(n_shared, j_r)
        if not len(combos):
            continue
        budget = max_size - j_r
        rows = max(1, 4096 // max(1, 2 ** min(budget, 8)))
        for start in range(0, len(combos), rows):
            chunk = shared[combos[start:start + rows]]
            h = _blocks_product(sub, blocks, chunk, private, budget)
            acc = h.sum(axis=0)
            top = min(budget, acc.shape[0] - 1)
            total[j_r:j_r + top + 1] += acc[: top + 1]
    if null:
        # variables with zero matrices may join T freely
        weights = np.array([math.comb(null, j) for j in range(max_size + 1)], dtype=float)
        spread = np.zeros_like(total)
        for j in range(max_size + 1):
            for t in range(j + 1):
                spread[j] += weights[j - t] * total[t]
        total = spread
    return total


def _blocks_product(sub, blocks, chunk: np.ndarray, private, budget: int) -> np.ndarray:
    """Bivariate generating polynomial (size, x) of the subset sums in a chunk.

    ``chunk`` holds rows of shared-variable indices. For each row the result
    sums ``s^|F| p_{R u F}(x)`` over private subsets ``F`` with ``|F| <= budget``.
    """
    n_rows = len(chunk)
    result = None
    cache: dict[bytes, np.ndarray] = {}
    for k, b in enumerate(blocks):
        mats_b = sub[k]
        nb = len(b)
        stack = np.stack(mats_b) if mats_b else np.zeros((0, nb, nb))
        if chunk.shape[1]:
            base = stack[chunk].sum(axis=1)
        else:
            base = np.zeros((n_rows, nb, nb), dtype=stack.dtype)
        priv = private[k]
        key = None
        if not len(priv):
            key = base.tobytes()
            if key in cache:
                g = cache[key]
                result = g if result is None else _bivariate_mul(result, g, budget)
                continue
        sizes, sums = [], []
        for j in range(min(len(priv), budget) + 1):
            cj = _combos(len(priv), j)
            if j == 0:
                sums.append(np.zeros((1, nb, nb), dtype=stack.dtype))
            else:
                sums.append(stack[priv[cj]].sum(axis=1))
            sizes.append(np.full(len(cj), j))
        sizes = np.concatenate(sizes)
        sums = np.concatenate(sums)
        mats_at = base[:, None] + sums[None, :]
        coeffs = _shifted_charpolys(mats_at)
        onehot = (sizes[:, None] == np.arange(sizes.max() + 1)[None, :]).astype(float)
        g = np.einsum("fk,cfx->ckx", onehot, coeffs)
        if key is not None:
            cache[key] = g
        result = g if result is None else _bivariate_mul(result, g, budget)
    return result


def _bivariate_mul(a: np.ndarray, b: np.ndarray, budget: int) -> np.ndarray:
    """Row-wise product of polynomials in (s, x), truncated at s-degree ``budget``."""
    n, sa, xa = a.shape
    _, sb, xb = b.shape
    out = np.zeros((n, min(sa + sb - 1, budget + 1), xa + xb - 1))
    for i in range(sb):
        if i > budget:
            break
        span = min(sa, budget + 1 - i)
        for j in range(xb):
            out[:, i:i + span, j:j + xa] += a[:, :span] * b[:, i, j, None, None]
    return out


def subset_count(m: int, d: int) -> int:
    return sum(math.comb(m, j) for j in range(min(m, d) + 1))


def mixed_charpoly(As: Sequence) -> RealPoly:
    """The mixed characteristic polynomial ``mu[A_1, ..., A_m](x)``."""
    mats = as_covariances(As)
    if not mats:
        raise DimensionMismatch("need at least one matrix")
    m = len(mats)
    d = mats[0].shape[0]
    if subset_count(m, d) > MAX_SUBSETS:
        raise TooManyVectors(f"{m} matrices of size {d} exceed the subset budget")
    top = min(m, d)
    sums = _subset_sums_by_size(mats, top)
    coeffs = np.zeros(d + 1)
    for k in range(top + 1):
        terms = [
            (-1) ** (k - j) * math.comb(m - j, k - j) * sums[j, d - k]
            for j in range(k + 1)
        ]
        coeffs[d - k] = (-1) ** k * math.fsum(terms)
    return RealPoly(coeffs)


def mixed_discriminant(Bs: Sequence) -> float:
    """``D(B_1, ..., B_k)`` with the identity padding convention for ``k < d``.

    Computed as ``sum_{T} (-1)^(d-|T|) det(sum_{i in T} B_i)``, which extracts
    the coefficient of ``z_1 ... z_d`` in ``det(sum_i z_i B_i)``.
    """
    mats = [np.asarray(b, dtype=complex) for b in Bs]
    if not mats:
        raise DimensionMismatch("need at least one matrix")
    d = mats[0].shape[0]
    if any(b.shape != (d, d) for b in mats) or len(mats) > d:
        raise DimensionMismatch("need at most d matrices of size d x d")
    pad = d - len(mats)
    mats = mats + [np.eye(d, dtype=complex)] * pad
    terms = []
    for size in range(d + 1):
        for t in itertools.combinations(range(d), size):
            total = sum((mats[i] for i in t), np.zeros((d, d), dtype=complex))
            terms.append((-1) ** (d - size) * np.linalg.det(total).real)
    return math.fsum(terms) / math.factorial(pad)


def brute_force_expected_charpoly(specs: Sequence[RandomVectorSpec]) -> RealPoly:
    """``E[det(xI - sum_i v_i v_i^*)]`` by enumerating every outcome."""
    specs = list(specs)
    if not specs:
        raise DimensionMismatch("need at least one random vector")
    d = specs[0].dim
    if any(s.dim != d for s in specs):
        raise DimensionMismatch("random vectors must share a dimension")
    n_out = math.prod(s.support_size for s in specs)
    if n_out > MAX_OUTCOMES:
        raise SupportTooLarge(f"{n_out} outcomes exceed {MAX_OUTCOMES}")
    outer = [np.einsum("ja,jb->jab", s.values, s.values.conj()) for s in specs]
    grid = np.indices([s.support_size for s in specs]).reshape(len(specs), -1).T
    partial_sums = []
    chunk = max(1, 2**18 // (d * d))
    for start in range(0, len(grid), chunk):
        idx = grid[start:start + chunk]
        mats = sum(outer[i][idx[:, i]] for i in range(len(specs)))
        prob = np.prod([specs[i].probs[idx[:, i]] for i in range(len(specs))], axis=0)
        lam = np.linalg.eigvalsh(mats)
        partial_sums.append(prob[:, None] * poly_from_roots_batch(lam))
    stacked = np.concatenate(partial_sums)
    return RealPoly([math.fsum(col) for col in stacked.T])


def tree_polynomial(fixed: Sequence, remaining: Sequence) -> RealPoly:
    """``E[chi(sum_fixed w w^* + sum_remaining v v^*)]`` without probability prefactor.

    Fixed vectors are support-one random vectors, so this is the mixed
    characteristic polynomial of their outer products together with the
    remaining covariances.
    """
    mats = [rank1(w) for w in fixed] + [np.asarray(a, dtype=complex) for a in remaining]
    if not mats:
        raise DimensionMismatch("need at least one vector or covariance")
    return mixed_charpoly(mats)


def jameslee_identity_check(a, spec: RandomVectorSpec) -> float:
    """``|E[det(A - v v^*)] - (1 - d/dt) det(A + t E[v v^*])|_{t=0}|``."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    if a.shape != (d, d) or spec.dim != d:
        raise DimensionMismatch("matrix and random vector dimensions differ")
    lhs = sum(p * np.linalg.det(a - np.outer(w, w.conj())) for w, p in spec.atoms())
    cov = covariance(spec)
    samples = np.array([np.linalg.det(a + t * cov) for t in range(d + 1)])
    coeffs = _interp_matrix(d) @ samples
    rhs = coeffs[0] - coeffs[1]
    return float(abs(lhs - rhs))
