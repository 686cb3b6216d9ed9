"""Dense complex Hermitian linear algebra.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_hermitian`
is the single entry point that validates and symmetrizes user input. Everything
else here is a pure function of its arguments.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IterationFailure,
    NonzeroDiagonal,
    NormTooLarge,
    NotHermitian,
    NotPSD,
)
from .upoly import RealPoly, poly_from_roots

PSD_TOL = 1e-9
HERMITIAN_TOL = 1e-12


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size < 1:
        raise DimensionMismatch("vectors must have length >= 1")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``a`` as Hermitian and return its exact symmetrization.

    The check is relative: ``|a - a^*|`` must be within ``tol * max|a|``.
    """
    a = np.array(a, dtype=complex, copy=True)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.conj().T)) > tol * max(scale, 1e-300):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    h = (a + a.conj().T) / 2
    h[np.diag_indices_from(h)] = h.diagonal().real
    return h


def rank1(v) -> np.ndarray:
    """The outer product ``v v^*``."""
    v = as_vector(v)
    return np.outer(v, v.conj())


def eigenvalues(m) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in nondecreasing order."""
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise IterationFailure(str(exc)) from exc


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise IterationFailure(str(exc)) from exc


def operator_norm(m) -> float:
    lam = eigenvalues(m)
    return float(max(abs(lam[0]), abs(lam[-1])))


def char_poly(m) -> RealPoly:
    """``det(xI - M)`` assembled as the product of ``(x - lambda_j)``."""
    lam = eigenvalues(m)
    # eigenvalues at roundoff level are snapped to exact zero so that
    # rank deficiency shows up as exact trailing zero coefficients
    floor = 1e-14 * (1.0 + float(np.max(np.abs(lam))))
    lam = np.where(np.abs(lam) <= floor, 0.0, lam)
    return RealPoly(poly_from_roots(lam))


def det(m) -> float:
    return float(np.prod(eigenvalues(m)))


def is_psd(m, tol: float = PSD_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    lam = eigenvalues(m)
    scale = max(abs(lam[0]), abs(lam[-1]))
    return bool(lam[0] >= -tol * (1.0 + scale))


def direct_sum(blocks: Sequence) -> np.ndarray:
    blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        s = b.shape[0]
        out[k:k + s, k:k + s] = b
        k += s
    return out


def apply_function(m, f) -> np.ndarray:
    """Hermitian functional calculus: ``U f(Lambda) U^*``."""
    lam, u = eigh(m)
    return (u * f(lam)) @ u.conj().T


def gram_vectors(q, tol: float = PSD_TOL) -> list[np.ndarray]:
    """Factor a PSD matrix as a Gram matrix, ``Q[i, j] = u_i^* u_j``.

    Returns one vector per row of ``Q``, each living in ``C^n`` with
    ``n = rank(Q)``. For a rank-``n`` projection the vectors also satisfy
    ``sum_i u_i u_i^* = I_n``.
    """
    q = as_hermitian(q, tol=1e-10)
    lam, u = eigh(q)
    scale = max(abs(lam[0]), abs(lam[-1]))
    if lam[0] < -tol * (1.0 + scale):
        raise NotPSD(f"matrix has eigenvalue {lam[0]:.3e}")
    keep = lam > tol
    # row i of U_keep Lambda^{1/2} conjugated gives u_i
    factor = u[:, keep] * np.sqrt(lam[keep])
    return [factor[i].conj() for i in range(q.shape[0])]


def dilation(t) -> np.ndarray:
    """Projection ``Q = 1/2 [[I+T, S], [S, I-T]]`` with ``S = (I - T^2)^{1/2}``.

    ``T`` must be a zero-diagonal self-adjoint contraction; ``Q`` is then a
    rank-``n`` projection of size ``2n`` with every diagonal entry ``1/2``.
    """
    t = as_hermitian(t)
    n = t.shape[0]
    if np.max(np.abs(t.diagonal())) > 1e-12:
        raise NonzeroDiagonal("dilation needs a zero-diagonal matrix")
    if operator_norm(t) > 1 + 1e-9:
        raise NormTooLarge("dilation needs ||T|| <= 1")
    eye = np.eye(n)
    s = apply_function(t, lambda lam: np.sqrt(np.clip(1.0 - lam**2, 0.0, None)))
    q = 0.5 * np.block([[eye + t, s], [s, eye - t]])
    return as_hermitian(q, tol=1e-10)
