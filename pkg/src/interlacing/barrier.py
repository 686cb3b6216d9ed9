"""Multivariate barrier functions and a replay of the root-bound induction.

For ``P(y) = det(sum_i y_i A_i)`` with ``sum_i A_i = I`` and
``trace(A_i) <= eps`` the induction starts at ``t * 1`` with
``t = eps + sqrt(eps)``, and after applying ``1 - d/dy_k`` moves coordinate
``k`` up by ``delta = 1 + sqrt(eps)``. Every barrier value stays below
``phi = eps / (eps + sqrt(eps))`` along the way, which places
``(1 + sqrt(eps))^2 * 1`` above the roots of the final polynomial.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    HypothesisViolated,
    NotAboveRoots,
    PreconditionFailed,
    ZeroDenominator,
)
from .mixedchar import as_covariances, mixed_charpoly
from .mpoly import (
    MultiPoly,
    above_roots_probe,
    axis_restriction,
    det_poly,
    diagonal,
    eval_scale,
    evaluate,
    one_minus_partial,
    partial,
)
from .upoly import max_root

PHI_SLACK = 1e-8
PD_FLOOR = 1e-10
FD_STEP = 1e-5
FD_SLACK = 1e-6
SYMBOLIC_MAX_M = 5
SYMBOLIC_MAX_D = 4


def barrier_det_form(As: Sequence, y, i: int) -> float:
    """``trace((sum_j y_j A_j)^{-1} A_i)``."""
    mats = [np.asarray(a, dtype=complex) for a in As]
    m = sum(yj * a for yj, a in zip(y, mats))
    lam = np.linalg.eigvalsh(m)
    if lam[0] <= PD_FLOOR:
        raise NotAboveRoots("sum_j y_j A_j is not positive definite")
    return float(np.trace(np.linalg.solve(m, mats[i])).real)


def barrier_general(p: MultiPoly, z, i: int) -> float:
    """``(d p / d z_i)(z) / p(z)`` with the derivative taken symbolically."""
    val = evaluate(p, z).real
    if abs(val) <= 1e-12 * max(eval_scale(p, z), 1e-300):
        raise ZeroDenominator("p vanishes at z")
    return float(evaluate(partial(p, i), z).real / val)


@dataclass
class TraceStep:
    k: int
    point: np.ndarray
    barrier_values: np.ndarray
    above_roots: bool

    @property
    def max_barrier(self) -> float:
        return float(np.max(self.barrier_values)) if len(self.barrier_values) else 0.0


@dataclass
class BarrierTrace:
    epsilon: float
    t: float
    delta: float
    phi: float
    steps: list[TraceStep] = field(default_factory=list)
    final_root: float = math.nan
    bound: float = math.nan
    symbolic: bool = True
    final_poly_agreement: float | None = None

    @property
    def barriers_ok(self) -> bool:
        return all(s.max_barrier <= self.phi + PHI_SLACK for s in self.steps)

    @property
    def above_ok(self) -> bool:
        return all(s.above_roots for s in self.steps)

    @property
    def bound_ok(self) -> bool:
        return self.final_root <= self.bound + PHI_SLACK


def trace_constants(epsilon: float) -> tuple[float, float, float]:
    """``(t, delta, phi)`` for a trace bound ``epsilon``."""
    root = math.sqrt(epsilon)
    return epsilon + root, 1.0 + root, epsilon / (epsilon + root)


def _check_hypotheses(mats: list[np.ndarray], epsilon: float) -> None:
    if epsilon <= 0:
        raise HypothesisViolated("epsilon must be positive")
    d = mats[0].shape[0]
    if np.max(np.abs(sum(mats) - np.eye(d))) > 1e-8:
        raise HypothesisViolated("covariances must sum to the identity")
    traces = [np.trace(a).real for a in mats]
    if max(traces) > epsilon + 1e-10:
        raise HypothesisViolated(f"max trace {max(traces):.6g} exceeds epsilon {epsilon:.6g}")


def run_barrier_trace(As: Sequence, epsilon: float, symbolic: bool | None = None) -> BarrierTrace:
    """Replay the barrier induction on ``As`` and check its claims numerically.

    With ``symbolic`` (default: when ``m <= 5`` and ``d <= 4``) every
    intermediate polynomial ``P_k`` is built and its barrier values at
    ``x^k`` recorded. Otherwise only the endpoint bound is checked through
    the mixed characteristic polynomial.
    """
    mats = as_covariances(As)
    _check_hypotheses(mats, epsilon)
    m, d = len(mats), mats[0].shape[0]
    t, delta, phi = trace_constants(epsilon)
    trace = BarrierTrace(epsilon, t, delta, phi, bound=(1 + math.sqrt(epsilon)) ** 2)
    if symbolic is None:
        symbolic = m <= SYMBOLIC_MAX_M and d <= SYMBOLIC_MAX_D
    trace.symbolic = symbolic
    mu = mixed_charpoly(mats)
    if not symbolic:
        trace.final_root = max_root(mu)
        return trace

    p = det_poly(mats, include_x=False)
    point = np.full(m, t)
    trace.steps.append(TraceStep(
        0, point.copy(),
        np.array([barrier_general(p, point, i) for i in range(m)]),
        above_roots_probe(p, point, det_form=mats),
    ))
    for k in range(m):
        p = one_minus_partial(p, k)
        point[k] += delta
        values = np.array([barrier_general(p, point, i) for i in range(m)])
        trace.steps.append(TraceStep(k + 1, point.copy(), values, above_roots_probe(p, point)))
    q = diagonal(p)
    scale = max(1.0, mu.scale())
    width = max(len(q.coeffs), len(mu.coeffs))
    diff = np.zeros(width)
    diff[: len(q.coeffs)] += q.coeffs
    diff[: len(mu.coeffs)] -= mu.coeffs
    trace.final_poly_agreement = float(np.max(np.abs(diff)) / scale)
    trace.final_root = max_root(q)
    return trace


@dataclass
class BarrierReport:
    slacks: np.ndarray
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(np.all(self.slacks >= -self.tolerance))

    @property
    def min_slack(self) -> float:
        return float(np.min(self.slacks)) if len(self.slacks) else math.inf


def barrier_shift_check(p: MultiPoly, z, j: int, delta: float) -> BarrierReport:
    """Compare ``Phi^i_p(z)`` with ``Phi^i_{p - d_j p}(z + delta e_j)`` for all ``i``.

    Requires ``z`` above the roots of ``p`` and ``Phi^j_p(z) <= 1 - 1/delta``;
    each slack ``Phi^i_p(z) - Phi^i_{p - d_j p}(z + delta e_j)`` should be
    nonnegative.
    """
    z = np.asarray(z, dtype=float)
    if delta <= 0:
        raise PreconditionFailed("delta must be positive")
    if not above_roots_probe(p, z):
        raise PreconditionFailed("z is not above the roots of p")
    if barrier_general(p, z, j) > 1 - 1 / delta + 1e-10:
        raise PreconditionFailed("barrier in direction j exceeds 1 - 1/delta")
    q = one_minus_partial(p, j)
    shifted = z.copy()
    shifted[j] += delta
    slacks = np.array([
        barrier_general(p, z, i) - barrier_general(q, shifted, i) for i in range(p.nvars)
    ])
    return BarrierReport(slacks, PHI_SLACK)


def _exact(c: float) -> Fraction:
    return Fraction(c)


def _poly_at(coeffs, s: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * s + _exact(c)
    return acc


@dataclass
class ShapeReport:
    first_derivative: float
    second_derivative: float
    tolerance: float = FD_SLACK

    @property
    def monotone(self) -> bool:
        return self.first_derivative <= self.tolerance

    @property
    def convex(self) -> bool:
        return self.second_derivative >= -self.tolerance

    @property
    def ok(self) -> bool:
        return self.monotone and self.convex


def monotone_convex_check(p: MultiPoly, z, i: int, j: int, h: float = FD_STEP) -> ShapeReport:
    """Central-difference signs of ``d/dz_j Phi^i_p`` and ``d^2/dz_j^2 Phi^i_p`` at ``z``.

    ``Phi^i_p`` along the ``e_j`` line is a ratio of two univariate
    polynomials in the offset ``s``; the stencil is evaluated on those in
    exact rational arithmetic, so the only error left is truncation.
    """
    z = np.asarray(z, dtype=float)
    if not above_roots_probe(p, z):
        raise PreconditionFailed("z is not above the roots of p")
    num = axis_restriction(partial(p, i), z, j).coeffs
    den = axis_restriction(p, z, j).coeffs
    step = _exact(h)

    def phi(s: Fraction) -> Fraction:
        return _poly_at(num, s) / _poly_at(den, s)

    lo, mid, hi = phi(-step), phi(Fraction(0)), phi(step)
    first = (hi - lo) / (2 * step)
    second = (hi - 2 * mid + lo) / (step * step)
    return ShapeReport(float(first), float(second))
