"""Dense multivariate polynomials in a handful of variables.

A :class:`MultiPoly` stores its coefficients in a dense grid of shape
``(max_deg + 1,) * nvars``; entry ``coeffs[a_1, ..., a_n]`` multiplies
``prod_i var_i ** a_i``. The grid is small by construction (at most 10**6
entries), which is plenty for ``det(xI + sum_i z_i A_i)`` with ``d <= 6`` and
five or fewer matrices.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import BadIndex, DimensionMismatch, GridTooLarge, LengthMismatch
from .upoly import RealPoly, roots

MAX_VARS = 8
MAX_GRID = 10**6


class MultiPoly:
    """Immutable dense multivariate polynomial with real coefficients."""

    __slots__ = ("_c", "names")

    def __init__(self, coeffs, names: Sequence[str] | None = None):
        c = np.array(coeffs, dtype=float)
        if c.ndim > MAX_VARS:
            raise GridTooLarge(f"at most {MAX_VARS} variables supported")
        if c.size > MAX_GRID:
            raise GridTooLarge(f"coefficient grid of {c.size} entries exceeds {MAX_GRID}")
        if c.ndim and len(set(c.shape)) != 1:
            raise ValueError("coefficient grid must be a hypercube")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        self._c = c
        if names is None:
            names = [f"z{i + 1}" for i in range(c.ndim)]
        if len(names) != c.ndim:
            raise LengthMismatch("one name per variable")
        self.names = tuple(names)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def nvars(self) -> int:
        return self._c.ndim

    @property
    def max_deg(self) -> int:
        return self._c.shape[0] - 1 if self._c.ndim else 0

    def scale(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def total_degree(self, rtol: float = 0.0) -> int:
        """Largest total degree carrying a coefficient above ``rtol * scale``."""
        mask = np.abs(self._c) > rtol * self.scale()
        if not mask.any():
            return -1
        return int(max(sum(idx) for idx in zip(*np.nonzero(mask))))

    def __call__(self, *point):
        return evaluate(self, point)

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return MultiPoly(self._c - other._c, self.names)

    def __repr__(self):
        return f"MultiPoly(nvars={self.nvars}, max_deg={self.max_deg}, names={self.names})"


@lru_cache(maxsize=None)
def _interp_matrix(n: int) -> np.ndarray:
    """Map values at nodes ``0..n`` to ascending monomial coefficients.

    Built from divided differences and the nested Newton form, in exact
    rational arithmetic, then rounded once to float.
    """
    cols = []
    for j in range(n + 1):
        y = [Fraction(int(i == j)) for i in range(n + 1)]
        # divided differences over nodes 0..n
        newton = list(y)
        for level in range(1, n + 1):
            for i in range(n, level - 1, -1):
                newton[i] = (newton[i] - newton[i - 1]) / level
        # expand a_0 + (x-0)(a_1 + (x-1)(a_2 + ...)) from the inside out
        poly = [newton[n]]
        for k in range(n - 1, -1, -1):
            shifted = [Fraction(0)] + poly
            scaled = [c * k for c in poly] + [Fraction(0)]
            poly = [s - t for s, t in zip(shifted, scaled)]
            poly[0] += newton[k]
        cols.append([float(c) for c in poly])
    return np.array(cols).T


def det_poly(As: Sequence, include_x: bool = True) -> MultiPoly:
    """``det(xI + sum_i z_i A_i)`` (or ``det(sum_i z_i A_i)``) as a polynomial.

    The determinant is homogeneous of degree ``d`` in its variables, so
    interpolation on the integer grid ``{0..d}^vars`` is exact; coefficients
    off the degree-``d`` shell are structural zeros and are set to zero.
    """
    mats = [np.asarray(a, dtype=complex) for a in As]
    if not mats and not include_x:
        raise DimensionMismatch("need at least one matrix or the x variable")
    if mats:
        d = mats[0].shape[0]
        if any(a.shape != (d, d) for a in mats):
            raise DimensionMismatch("all matrices must share one dimension")
    else:
        raise DimensionMismatch("need at least one matrix to fix the dimension")
    basis = ([np.eye(d, dtype=complex)] if include_x else []) + mats
    nv = len(basis)
    if nv > MAX_VARS or (d + 1) ** nv > MAX_GRID:
        raise GridTooLarge(f"{nv} variables at degree {d} exceed the grid budget")
    stack = np.stack(basis)
    grid = np.indices((d + 1,) * nv).reshape(nv, -1).T.astype(float)
    values = np.empty(len(grid))
    chunk = max(1, 2**22 // (d * d))
    for start in range(0, len(grid), chunk):
        pts = grid[start:start + chunk]
        mats_at = np.tensordot(pts, stack, axes=(1, 0))
        values[start:start + chunk] = np.linalg.det(mats_at).real
    coeffs = values.reshape((d + 1,) * nv)
    vinv = _interp_matrix(d)
    for axis in range(nv):
        coeffs = np.moveaxis(np.tensordot(vinv, coeffs, axes=(1, axis)), 0, axis)
    degree_shell = np.indices(coeffs.shape).sum(axis=0)
    coeffs = np.where(degree_shell == d, coeffs, 0.0)
    names = (["x"] if include_x else []) + [f"z{i + 1}" for i in range(len(mats))]
    return MultiPoly(coeffs, names)


def _check_index(p: MultiPoly, i: int) -> None:
    if not 0 <= i < p.nvars:
        raise BadIndex(f"variable index {i} out of range for {p.nvars} variables")


def partial(p: MultiPoly, i: int) -> MultiPoly:
    _check_index(p, i)
    c = np.moveaxis(p.coeffs, i, 0)
    out = np.zeros_like(c)
    k = np.arange(1, c.shape[0]).reshape((-1,) + (1,) * (c.ndim - 1))
    out[:-1] = c[1:] * k
    return MultiPoly(np.moveaxis(out, 0, i), p.names)


def one_minus_partial(p: MultiPoly, i: int) -> MultiPoly:
    """``p - d p / d var_i``."""
    return p - partial(p, i)


def restrict(p: MultiPoly, i: int, a: float) -> MultiPoly:
    """Substitute ``var_i = a``; the result has one variable fewer."""
    _check_index(p, i)
    c = np.moveaxis(p.coeffs, i, 0)
    acc = np.zeros(c.shape[1:])
    for k in range(c.shape[0] - 1, -1, -1):
        acc = acc * a + c[k]
    names = p.names[:i] + p.names[i + 1:]
    return MultiPoly(acc, names)


def _horner_complex(c: np.ndarray, point) -> complex:
    acc = np.asarray(c, dtype=complex)
    for z in reversed(point):
        # last axis first
        out = np.zeros(acc.shape[:-1], dtype=complex)
        for k in range(acc.shape[-1] - 1, -1, -1):
            out = out * z + acc[..., k]
        acc = out
    return complex(acc)


def evaluate(p: MultiPoly, point) -> complex:
    point = [complex(z) for z in point]
    if len(point) != p.nvars:
        raise LengthMismatch(f"expected {p.nvars} coordinates, got {len(point)}")
    return _horner_complex(p.coeffs, point)


# ``eval`` shadows the builtin only as a module attribute
eval = evaluate


def eval_scale(p: MultiPoly, point) -> float:
    """``sum_a |c_a| |point|^a``: the natural size of ``p(point)``."""
    mags = [abs(complex(z)) for z in point]
    return float(evaluate(MultiPoly(np.abs(p.coeffs), p.names), mags).real)


def univariate(p: MultiPoly) -> RealPoly:
    if p.nvars != 1:
        raise LengthMismatch("polynomial is not univariate")
    return RealPoly(p.coeffs)


def diagonal(p: MultiPoly) -> RealPoly:
    """The univariate polynomial ``p(x, x, ..., x)``."""
    if p.nvars == 0:
        return RealPoly([float(p.coeffs)])
    tdeg = np.indices(p.coeffs.shape).sum(axis=0)
    out = np.zeros(p.nvars * p.max_deg + 1)
    np.add.at(out, tdeg.ravel(), p.coeffs.ravel())
    return RealPoly(out)


def axis_restriction(p: MultiPoly, z, i: int) -> RealPoly:
    """``t -> p(z + t e_i)``, computed exactly by Taylor shifting."""
    _check_index(p, i)
    z = list(np.asarray(z, dtype=float))
    q = p
    for j in range(p.nvars - 1, -1, -1):
        if j != i:
            q = restrict(q, j, z[j])
    c = q.coeffs
    return RealPoly(_taylor_shift(c, z[i]))


def _taylor_shift(c: np.ndarray, a: float) -> np.ndarray:
    """Coefficients of ``f(t + a)`` given those of ``f``."""
    c = np.array(c, dtype=float)
    n = len(c)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            c[k] += a * c[k + 1]
    return c


def stability_falsifier(p: MultiPoly, trials: int = 200, seed: int = 0):
    """Search for a zero of ``p`` with every coordinate in the upper half-plane.

    Each trial draws a point with imaginary parts log-uniform in (0.01, 10)
    and real parts uniform in (-10, 10), picks one coordinate, and solves
    the univariate restriction in that coordinate exactly. Returns the
    offending point as a tuple of complex numbers, or ``None``. A ``None``
    result is evidence of stability, not proof.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n = p.nvars
    if n == 0:
        return None
    for _ in range(trials):
        pt = rng.uniform(-10, 10, n) + 1j * np.exp(rng.uniform(np.log(0.01), np.log(10), n))
        i = int(rng.integers(n))
        c = _coeffs_in(p, pt, i)
        nz = np.flatnonzero(np.abs(c) > 1e-14 * max(np.max(np.abs(c)), 1e-300))
        if nz.size == 0 or nz[-1] == 0:
            continue
        rts = npoly.polyroots(c[: nz[-1] + 1])
        for r in rts:
            if r.imag <= 1e-7 * (1 + abs(r)):
                continue
            r = _polish_complex(c[: nz[-1] + 1], r)
            cand = pt.copy()
            cand[i] = r
            if abs(evaluate(p, cand)) <= 1e-10 * max(eval_scale(p, cand), 1e-300):
                return tuple(complex(v) for v in cand)
    return None


def _coeffs_in(p: MultiPoly, pt, i: int) -> np.ndarray:
    """Complex coefficients of the restriction of ``p`` to coordinate ``i``."""
    c = np.moveaxis(np.asarray(p.coeffs, dtype=complex), i, 0)
    others = [pt[j] for j in range(p.nvars) if j != i]
    return np.array([_horner_complex(c[k], others) if others else complex(c[k])
                     for k in range(c.shape[0])])


def _polish_complex(c: np.ndarray, r: complex) -> complex:
    dc = npoly.polyder(c)
    for _ in range(3):
        d = npoly.polyval(r, dc)
        if d == 0:
            break
        r = r - npoly.polyval(r, c) / d
    return complex(r)


def above_roots_probe(
    p: MultiPoly,
    z,
    rays: int = 16,
    seed: int = 0,
    det_form: Sequence | None = None,
) -> bool:
    """Heuristic test that ``p`` is positive on the orthant ``z + R_{>=0}^n``.

    When ``det_form`` (PSD matrices with ``p = det(sum_i z_i A_i)``) is
    supplied, the answer is exact: ``sum_i z_i A_i`` must be positive
    definite. Otherwise three sampled conditions are checked: ``p(z) > 0``,
    every axis restriction has all roots strictly left of ``z``, and ``p``
    stays positive along random nonnegative rays.
    """
    z = np.asarray(z, dtype=float)
    if det_form is not None:
        m = sum(zi * np.asarray(a, dtype=complex) for zi, a in zip(z, det_form))
        return bool(np.linalg.eigvalsh(m)[0] > 1e-10)
    if evaluate(p, z).real <= 0:
        return False
    for i in range(p.nvars):
        # leading terms at roundoff level would put a spurious root near infinity
        q = axis_restriction(p, z, i).trimmed(1e-13)
        if q.degree >= 1:
            if np.max(roots(q).real) >= 0:
                return False
    rng = np.random.default_rng(seed)
    reach = 10.0 * (1.0 + np.linalg.norm(z))
    ts = np.linspace(0.0, reach, 32)
    for _ in range(rays):
        u = np.abs(rng.standard_normal(p.nvars))
        u /= max(np.linalg.norm(u), 1e-300)
        for t in ts:
            if evaluate(p, z + t * u).real <= 0:
                return False
    return True
