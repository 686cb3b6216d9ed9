"""Univariate polynomials with real coefficients.

Coefficients are stored in ascending degree order. Root finding goes through
the eigenvalues of a balanced companion matrix, followed by one Newton step.
Floating-point coefficients smear a ``k``-fold root into a small circle of
radius roughly ``eps ** (1/k)``; :func:`real_roots` recognises such clusters
and collapses them back onto the real axis.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.linalg import matrix_balance
from scipy.optimize import brentq

from .errors import (
    BadWeights,
    DegreeMismatch,
    IterationFailure,
    NonPositiveLeading,
    NotRealRooted,
)

REAL_ROOT_TOL = 1e-6
# relative coefficient noise assumed when deciding whether a root cluster
# is a smeared multiple root: a k-cluster may spread to CLUSTER_NOISE**(1/k)
CLUSTER_NOISE = 1e-12
# relative coefficient error attributed to roundoff when testing whether a
# root cluster is a perturbed multiple root
ROUNDOFF_NOISE = 1e-13


class RealPoly:
    """Immutable real polynomial, ``coeffs[k]`` multiplies ``x**k``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_roots(cls, roots) -> RealPoly:
        return cls(poly_from_roots(np.asarray(roots, dtype=float)))

    @classmethod
    def monomial(cls, k: int, scale: float = 1.0) -> RealPoly:
        c = np.zeros(k + 1)
        c[k] = scale
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self._c) - 1

    @property
    def leading(self) -> float:
        return float(self._c[-1]) if len(self._c) else 0.0

    def scale(self) -> float:
        return float(np.max(np.abs(self._c))) if len(self._c) else 0.0

    def __call__(self, x):
        if not len(self._c):
            return np.zeros_like(np.asarray(x, dtype=float))
        return npoly.polyval(x, self._c)

    def trimmed(self, rtol: float) -> RealPoly:
        """Drop leading coefficients below ``rtol`` times the largest one."""
        c = self._c
        keep = np.flatnonzero(np.abs(c) > rtol * self.scale())
        return RealPoly(c[: keep[-1] + 1] if keep.size else c[:0])

    def deriv(self, k: int = 1) -> RealPoly:
        if self.degree < k:
            return RealPoly([])
        return RealPoly(npoly.polyder(self._c, k))

    def _series(self) -> np.ndarray:
        # numpy's series helpers reject empty arrays
        return self._c if len(self._c) else np.zeros(1)

    def _coerce(self, other):
        if isinstance(other, RealPoly):
            return other._series()
        return np.array([float(other)])

    def __add__(self, other):
        return RealPoly(npoly.polyadd(self._series(), self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RealPoly(npoly.polysub(self._series(), self._coerce(other)))

    def __rsub__(self, other):
        return RealPoly(npoly.polysub(self._coerce(other), self._series()))

    def __neg__(self):
        return RealPoly(-self._c)

    def __mul__(self, other):
        if isinstance(other, RealPoly):
            if not len(self._c) or not len(other._c):
                return RealPoly([])
            return RealPoly(npoly.polymul(self._c, other._c))
        return RealPoly(self._c * float(other))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return RealPoly(self._c / float(s))

    def __eq__(self, other):
        if not isinstance(other, RealPoly):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"RealPoly({self._c.tolist()!r})"


def poly_from_roots(roots) -> np.ndarray:
    """Ascending coefficients of the monic polynomial with the given roots."""
    return poly_from_roots_batch(np.asarray(roots, dtype=float)[None, :])[0]


def poly_from_roots_batch(roots: np.ndarray) -> np.ndarray:
    """Row-wise :func:`poly_from_roots` for an ``(N, n)`` array of roots."""
    roots = np.asarray(roots, dtype=float)
    n_poly, n = roots.shape
    c = np.zeros((n_poly, n + 1))
    c[:, 0] = 1.0
    for j in range(n):
        # multiply the current (degree j) polynomial by (x - r_j)
        shifted = np.zeros_like(c)
        shifted[:, 1:j + 2] = c[:, : j + 1]
        c = shifted - roots[:, j:j + 1] * c
    return c


def _companion_roots(monic: np.ndarray) -> np.ndarray:
    n = len(monic) - 1
    if n == 1:
        return np.array([-monic[0]], dtype=complex)
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic[:-1]
    with np.errstate(invalid="ignore"):
        balanced, _ = matrix_balance(comp, permute=False)
    try:
        return np.linalg.eigvals(balanced).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise IterationFailure(str(exc)) from exc


def roots(p: RealPoly) -> np.ndarray:
    """All complex roots of ``p`` with multiplicity, sorted by real part."""
    if p.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    c = p.coeffs
    n_zero = int(np.argmax(c != 0))
    rest = c[n_zero:] / c[-1]
    found = [np.zeros(n_zero, dtype=complex)]
    if len(rest) > 1:
        r = _companion_roots(rest)
        found.append(_newton_polish(rest, r))
    out = np.concatenate(found)
    return out[np.lexsort((out.imag, out.real))]


def _newton_polish(c: np.ndarray, r: np.ndarray) -> np.ndarray:
    dc = npoly.polyder(c)
    val = npoly.polyval(r, c)
    der = npoly.polyval(r, dc)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(der != 0, val / der, 0.0)
    cand = r - step
    better = np.abs(npoly.polyval(cand, c)) < np.abs(val)
    return np.where(better & np.isfinite(cand), cand, r)


def _is_real(z, tol: float) -> bool:
    return abs(z.imag) <= tol * (1.0 + abs(z))


CLUSTER_REACH = 0.1


def _collapse_clusters(p: RealPoly, r: np.ndarray, tol: float):
    """Replace smeared multiple roots by their refined real centre.

    For each root, the ``k`` nearest roots (``k >= 2``) form a candidate
    cluster. It is accepted when its centre is real and
    :func:`_is_multiple_root` confirms a ``k``-fold real root up to
    coefficient roundoff; the largest accepted ``k`` wins. Returns ``(cleaned_roots, cluster_flags)``.
    """
    r = r.copy()
    flags = np.zeros(len(r), dtype=bool)
    n = len(r)
    for i in range(n):
        if flags[i]:
            continue
        order = np.argsort(np.abs(r - r[i]), kind="stable")
        best = None
        for k in range(2, n + 1):
            idx = order[:k]
            if flags[idx].any():
                break
            centre = r[idx].mean()
            radius = np.max(np.abs(r[idx] - centre))
            reach = 1.0 + abs(centre)
            if radius > CLUSTER_REACH * reach:
                break
            if not _is_real(centre, tol):
                continue
            if _is_multiple_root(p, centre.real, k, radius):
                best = (idx, centre.real, radius)
        if best is not None:
            idx, c, radius = best
            r[idx] = _refine_multiple(p, c, len(idx), radius)
            flags[idx] = True
    return r, flags


def _is_multiple_root(p: RealPoly, x: float, k: int, radius: float = 0.0) -> bool:
    """Whether ``x`` is a ``k``-fold root of ``p`` up to coefficient roundoff.

    Tight clusters of real roots are ill-conditioned: a relative coefficient
    perturbation near machine precision can push them off the real axis by
    far more than ``ROUNDOFF_NOISE ** (1/k)``. A centre error ``e`` leaves
    ``p^(j)(x)`` of order ``e^(k-j)``, so derivative ``j`` is tested against
    ``ROUNDOFF_NOISE ** ((k-j)/k)`` times its absolute-value evaluation.
    The cluster ``radius`` must also be within the spread that a relative
    perturbation of size ``ROUNDOFF_NOISE`` can cause,
    ``(noise * k! / |p^(k)(x)|) ** (1/k)``.
    """
    ax = abs(x)
    q = p
    noise = ROUNDOFF_NOISE * npoly.polyval(ax, np.abs(p.coeffs))
    for j in range(k):
        c = q.coeffs
        if not len(c):
            return True
        absval = npoly.polyval(ax, np.abs(c))
        if abs(q(x)) > ROUNDOFF_NOISE ** ((k - j) / k) * absval:
            return False
        q = q.deriv()
    top = abs(q(x)) / math.factorial(k)
    return top == 0 or radius <= (noise / top) ** (1.0 / k)


def _refine_multiple(p: RealPoly, x0: float, k: int, radius: float) -> float:
    """Newton on the (k-1)-th derivative, where a k-fold root is simple."""
    q = p.deriv(k - 1)
    dq = q.deriv()
    x = x0
    for _ in range(8):
        d = dq(x)
        if d == 0:
            break
        step = q(x) / d
        x -= step
        if abs(step) <= 1e-16 * (1 + abs(x)):
            break
    # perturbed clusters are lopsided, so the mean can sit a few radii off
    window = max(4 * radius, CLUSTER_NOISE ** (1.0 / k) * (1 + abs(x0)))
    if not np.isfinite(x) or abs(x - x0) > window:
        return x0
    return float(x)


def real_roots(p: RealPoly, tol: float = REAL_ROOT_TOL) -> np.ndarray:
    """Sorted real roots of a real-rooted ``p``; raises :class:`NotRealRooted`."""
    cleaned, _ = _collapse_clusters(p, roots(p), tol)
    if not all(_is_real(z, tol) for z in cleaned):
        worst = cleaned[np.argmax(np.abs(cleaned.imag))]
        raise NotRealRooted(f"root {worst:.6g} is not real within tol {tol:g}")
    return np.sort(cleaned.real)


def max_imag_ratio(p: RealPoly, tol: float = REAL_ROOT_TOL) -> float:
    """Largest ``|Im z| / (1 + |z|)`` over the roots once multiple roots are merged."""
    if p.degree < 1:
        return 0.0
    cleaned, _ = _collapse_clusters(p, roots(p), tol)
    return float(np.max(np.abs(cleaned.imag) / (1.0 + np.abs(cleaned))))


def is_real_rooted(p: RealPoly, tol: float = REAL_ROOT_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if p.degree < 1:
        return True
    try:
        real_roots(p, tol)
    except NotRealRooted:
        return False
    return True


def max_root(p: RealPoly, tol: float = REAL_ROOT_TOL, assume_real: bool = False) -> float:
    """Largest root of a real-rooted polynomial.

    A simple top root is polished by bracketing between the second-largest
    root and the top estimate; a clustered top root is reported at its
    refined centre. With ``assume_real`` the caller vouches that ``p`` is
    real-rooted in exact arithmetic, and roots pushed off the axis by
    coefficient roundoff are projected back onto it instead of raising.
    """
    if p.degree < 1:
        raise ValueError("max_root() needs a polynomial of degree >= 1")
    cleaned, flags = _collapse_clusters(p, roots(p), tol)
    if not all(_is_real(z, tol) for z in cleaned):
        if not assume_real:
            raise NotRealRooted("polynomial is not real-rooted")
        cleaned = cleaned.real.astype(complex)
    order = np.argsort(cleaned.real)
    vals = cleaned.real[order]
    top = float(vals[-1])
    if flags[order[-1]]:
        return top
    below = vals[-2] if len(vals) > 1 else top - 1.0
    lo = 0.5 * (below + top)
    hi = top + (top - lo)
    flo, fhi = p(lo), p(hi)
    if flo == 0:
        return float(lo)
    if np.sign(flo) == np.sign(fhi):
        return top
    return float(brentq(p, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def interlaces(g: RealPoly, f: RealPoly, tol: float = REAL_ROOT_TOL) -> bool:
    """Whether the roots of ``g`` separate the sorted roots of ``f``."""
    if g.degree != f.degree - 1:
        raise DegreeMismatch("interlacing needs deg g = deg f - 1")
    if g.degree == 0:
        return True
    alpha = real_roots(g)
    beta = real_roots(f)
    for i, a in enumerate(alpha):
        if beta[i] - a > tol or a - beta[i + 1] > tol:
            return False
    return True


def convex_combo(fs: Sequence[RealPoly], lambdas: Sequence[float]) -> RealPoly:
    lam = np.asarray(lambdas, dtype=float)
    if len(lam) != len(fs):
        raise BadWeights("need one weight per polynomial")
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-12:
        raise BadWeights("weights must be nonnegative and sum to 1")
    width = max(len(f.coeffs) for f in fs)
    acc = np.zeros(width)
    for w, f in zip(lam, fs):
        acc[: len(f.coeffs)] += w * f.coeffs
    return RealPoly(acc)


def common_interlacing_check(
    fs: Sequence[RealPoly],
    samples: int = 64,
    tol: float = REAL_ROOT_TOL,
    seed: int = 0,
) -> bool:
    """Falsification test for a common interlacing of ``fs``.

    The family has a common interlacing iff every convex combination is
    real-rooted. This checks the vertices, all pairwise midpoints and
    ``samples`` uniform draws from the simplex.
    """
    fs = list(fs)
    if not fs:
        return True
    degs = {f.degree for f in fs}
    if len(degs) != 1:
        raise DegreeMismatch("all polynomials must share a degree")
    if any(f.leading <= 0 for f in fs):
        raise NonPositiveLeading("leading coefficients must be positive")
    k = len(fs)
    weights = [np.eye(k)[i] for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            w = np.zeros(k)
            w[[i, j]] = 0.5
            weights.append(w)
    if k > 1:
        rng = np.random.default_rng(seed)
        weights.extend(rng.dirichlet(np.ones(k), size=samples))
    for w in weights:
        w = w / w.sum()
        if not is_real_rooted(convex_combo(fs, w), tol):
            return False
    return True
