"""Constructions driven by interlacing families.

Every routine here walks the tree of partial assignments of a list of
independent random vectors. The node polynomial after fixing the first ``k``
vectors is the mixed characteristic polynomial of the fixed outer products
together with the remaining covariances; some child always has largest root
no bigger than its parent, so a greedy descent ends at an outcome whose
spectral norm is at most the largest root of the expected polynomial.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadParameters,
    BudgetExceeded,
    DimensionMismatch,
    NonzeroDiagonal,
    NormTooLarge,
    NotDecomposition,
    NotIsotropic,
    NotRealRooted,
    SupportTooLarge,
)
from .hermitian import as_hermitian, as_vector, dilation, gram_vectors, operator_norm
from .mixedchar import RandomVectorSpec, covariance, mixed_charpoly, tree_polynomial
from .upoly import RealPoly, common_interlacing_check, max_root

ISOTROPY_TOL = 1e-8
WEAVER_ISOTROPY_TOL = 1e-6
DESCENT_SLACK = 1e-8
CERT_SLACK = 1e-8
MAX_SUPPORT = 256
TREE_BUDGET = 4096


class IsotropyWarning(UserWarning):
    """Covariances do not sum to the identity; no bound is certified."""


@dataclass(frozen=True)
class AssignmentNode:
    """A node of the assignment tree.

    ``chosen`` lists ``(vector index, atom index)`` pairs. ``polynomial`` is the
    node polynomial without its probability prefactor, which does not move
    roots. ``path_roots[k]`` is the largest root at depth ``k`` of the path
    that led here, starting with the expected polynomial.
    """

    chosen: tuple[tuple[int, int], ...]
    polynomial: RealPoly
    max_root: float
    path_roots: tuple[float, ...] = ()
    certified_bound: float | None = None
    notes: tuple[str, ...] = ()

    @property
    def descent_ok(self) -> bool:
        r = self.path_roots
        return all(b <= a + DESCENT_SLACK * (1.0 + abs(a)) for a, b in zip(r, r[1:]))


@dataclass(frozen=True)
class PartitionResult:
    parts: tuple[tuple[int, ...], ...]
    part_norms: np.ndarray
    certified_bound: float | None
    delta: float
    r: int
    vacuous: bool = False
    leaf: AssignmentNode | None = None
    warnings: tuple[str, ...] = ()

    @property
    def max_norm(self) -> float:
        return float(np.max(self.part_norms))

    @property
    def slack(self) -> float | None:
        """``certified_bound - max part norm``; negative means a violated certificate."""
        if self.certified_bound is None:
            return None
        return self.certified_bound - self.max_norm

    @property
    def ok(self) -> bool:
        return self.slack is None or self.slack >= -CERT_SLACK


@dataclass(frozen=True)
class PavingResult:
    parts: tuple[tuple[int, ...], ...]
    ratios: np.ndarray
    epsilon: float
    r_used: int
    certified_ratio: float
    vacuous: bool
    asymptotic_r: int
    warnings: tuple[str, ...] = ()

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if len(self.ratios) else 0.0

    @property
    def certificate_ok(self) -> bool:
        """Measured ratios respect the composed bound whenever it is below 1."""
        return self.vacuous or self.max_ratio <= self.certified_ratio + CERT_SLACK

    @property
    def meets_epsilon(self) -> bool:
        return self.max_ratio <= self.epsilon + CERT_SLACK


def _isotropy_error(mats: Sequence[np.ndarray]) -> float:
    d = mats[0].shape[0]
    return float(np.max(np.abs(sum(mats) - np.eye(d))))


def greedy_assign(specs: Sequence[RandomVectorSpec]) -> AssignmentNode:
    """Descend the assignment tree always taking the child of smallest largest root.

    Ties go to the lowest atom index and atoms of probability zero are
    skipped. When the covariances sum to the identity the returned leaf
    carries the bound ``(1 + sqrt(eps))^2`` with ``eps = max_i E|v_i|^2``;
    otherwise an :class:`IsotropyWarning` is issued and no bound is attached.
    """
    specs = list(specs)
    if not specs:
        raise DimensionMismatch("need at least one random vector")
    d = specs[0].dim
    if any(s.dim != d for s in specs):
        raise DimensionMismatch("random vectors must share a dimension")
    if any(s.support_size > MAX_SUPPORT for s in specs):
        raise SupportTooLarge(f"support sizes are limited to {MAX_SUPPORT}")
    covs = [covariance(s) for s in specs]
    bound = None
    if _isotropy_error(covs) > ISOTROPY_TOL:
        warnings.warn("covariances do not sum to the identity", IsotropyWarning, stacklevel=2)
    else:
        eps = max(float(np.trace(c).real) for c in covs)
        bound = (1.0 + math.sqrt(eps)) ** 2

    projected = False

    def node_root(q: RealPoly) -> float:
        # node polynomials are real-rooted in exact arithmetic; at high degree
        # the monomial basis can still push close roots off the axis
        nonlocal projected
        try:
            return max_root(q)
        except NotRealRooted:
            projected = True
            return max_root(q, assume_real=True)

    poly = mixed_charpoly(covs)
    roots = [node_root(poly)]
    fixed: list[np.ndarray] = []
    chosen: list[tuple[int, int]] = []
    for k, spec in enumerate(specs):
        best = None
        for j, (w, p) in enumerate(spec.atoms()):
            if p <= 0:
                continue
            q = tree_polynomial(fixed + [w], covs[k + 1:])
            root = node_root(q)
            if best is None or root < best[0]:
                best = (root, j, q)
        root, j, poly = best
        fixed.append(spec.values[j])
        chosen.append((k, j))
        roots.append(root)
    notes = ("some node roots were computed off the real axis and projected back; "
             "root comparisons there are approximate",) if projected else ()
    return AssignmentNode(tuple(chosen), poly, roots[-1], tuple(roots), bound, notes)


def lifted_specs(us: Sequence, r: int) -> list[RandomVectorSpec]:
    """Random vectors in ``C^(rd)`` placing ``sqrt(r) u_i`` in a uniform random block."""
    out = []
    for u in us:
        d = len(u)
        vals = np.zeros((r, r * d), dtype=complex)
        for k in range(r):
            vals[k, k * d:(k + 1) * d] = math.sqrt(r) * u
        out.append(RandomVectorSpec(vals, np.full(r, 1.0 / r)))
    return out


def _frame(vectors: Sequence) -> list[np.ndarray]:
    vs = [as_vector(v) for v in vectors]
    if not vs:
        raise DimensionMismatch("need at least one vector")
    if any(len(v) != len(vs[0]) for v in vs):
        raise DimensionMismatch("vectors must share a dimension")
    return vs


def _frame_operator(vs: Sequence[np.ndarray], idx=None) -> np.ndarray:
    d = len(vs[0])
    idx = range(len(vs)) if idx is None else idx
    out = np.zeros((d, d), dtype=complex)
    for i in idx:
        out += np.outer(vs[i], vs[i].conj())
    return out


def _part_norms(vs, parts) -> np.ndarray:
    return np.array([operator_norm(_frame_operator(vs, p)) if p else 0.0 for p in parts])


def partition_r(
    us: Sequence, r: int, tol: float = ISOTROPY_TOL, require_isotropic: bool = True
) -> PartitionResult:
    """Split a Parseval decomposition ``sum u_i u_i^* = I`` into ``r`` parts.

    Each part ``S_k`` satisfies ``|| sum_{i in S_k} u_i u_i^* || <= (1/sqrt(r) + sqrt(delta))^2``
    with ``delta = max |u_i|^2``. With ``require_isotropic=False`` a
    non-isotropic input is still partitioned greedily, but no bound is
    certified.
    """
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise BadParameters("r must be a positive integer")
    r = int(r)
    us = _frame(us)
    d = len(us[0])
    delta = max(float(np.vdot(u, u).real) for u in us)
    bound = (1.0 / math.sqrt(r) + math.sqrt(delta)) ** 2
    notes: tuple[str, ...] = ()
    if np.max(np.abs(_frame_operator(us) - np.eye(d))) > tol:
        if require_isotropic:
            raise NotDecomposition("sum of u_i u_i^* is not the identity")
        bound, notes = None, ("sum of u_i u_i^* is not the identity; no bound certified",)
    if r == 1:
        parts = (tuple(range(len(us))),)
        return PartitionResult(parts, _part_norms(us, parts), bound, delta, 1, warnings=notes)
    with warnings.catch_warnings():
        # isotropy was checked above at the caller's tolerance
        warnings.simplefilter("ignore", IsotropyWarning)
        leaf = greedy_assign(lifted_specs(us, r))
    labels = [j for _, j in leaf.chosen]
    parts = tuple(tuple(i for i, k in enumerate(labels) if k == part) for part in range(r))
    return PartitionResult(parts, _part_norms(us, parts), bound, delta, r, leaf=leaf,
                           warnings=notes + leaf.notes)


def weaver_bound(eta: float) -> float:
    """``eta * (1/sqrt(2) + 1/sqrt(eta))^2``; equals 16 at ``eta = 18``."""
    return eta * (1.0 / math.sqrt(2.0) + 1.0 / math.sqrt(eta)) ** 2


def weaver_partition(ws: Sequence, eta: float) -> PartitionResult:
    """Two-part split of vectors with ``|w_i| <= 1`` and ``sum w_i w_i^* = eta I``.

    Both parts have frame operator norm at most :func:`weaver_bound`; the
    result is flagged ``vacuous`` when that bound is not below ``eta``.
    """
    if not eta > 0:
        raise BadParameters("eta must be positive")
    ws = _frame(ws)
    if max(np.linalg.norm(w) for w in ws) > 1 + 1e-9:
        raise NormTooLarge("weaver vectors must have norm at most 1")
    d = len(ws[0])
    if np.max(np.abs(_frame_operator(ws) - eta * np.eye(d))) > WEAVER_ISOTROPY_TOL:
        raise NotIsotropic("sum of w_i w_i^* is not eta times the identity")
    scaled = [w / math.sqrt(eta) for w in ws]
    inner = partition_r(scaled, 2, tol=WEAVER_ISOTROPY_TOL / eta)
    bound = weaver_bound(eta)
    vacuous = bound >= eta
    notes = (f"bound {bound:.6g} is not below eta = {eta:g}",) if vacuous else ()
    notes += inner.warnings
    return PartitionResult(
        inner.parts, _part_norms(ws, inner.parts), bound, inner.delta * eta, 2,
        vacuous=vacuous, leaf=inner.leaf, warnings=notes,
    )


def quadratic_form_spot_check(ws: Sequence, parts, n_dirs: int = 100, seed: int = 0) -> float:
    """Largest ``sum_{i in S} |<u, w_i>|^2`` over random unit ``u`` and the given parts."""
    ws = _frame(ws)
    rng = np.random.default_rng(seed)
    d = len(ws[0])
    u = rng.standard_normal((n_dirs, d)) + 1j * rng.standard_normal((n_dirs, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    w = np.array(ws)
    ip = np.abs(u.conj() @ w.T) ** 2
    return max(float(np.max(ip[:, list(p)].sum(axis=1))) if p else 0.0 for p in parts)


def inner_paving_bound(r: int) -> float:
    """Partition bound for the Gram vectors of a dilation, where ``delta = 1/2``."""
    return (1.0 / math.sqrt(r) + math.sqrt(0.5)) ** 2


def pave(t, eps: float, r_override: int | None = None) -> PavingResult:
    """Coordinate paving of a zero-diagonal self-adjoint ``T``.

    Gram vectors of the dilations of ``T`` and ``-T`` are each split into ``r``
    parts; intersecting the two coordinate partitions gives at most ``r^2``
    blocks with ``||P T P|| <= (2b - 1) ||T||``, where ``b`` is
    :func:`inner_paving_bound`. That is informative only for ``r >= 12``.
    """
    if not eps > 0:
        raise BadParameters("eps must be positive")
    t = as_hermitian(t, tol=1e-10)
    n = t.shape[0]
    if np.max(np.abs(t.diagonal())) > 1e-10:
        raise NonzeroDiagonal("paving needs a zero-diagonal matrix")
    r = int(r_override) if r_override is not None else math.ceil(36.0 / eps**2)
    if r < 1:
        raise BadParameters("r must be a positive integer")
    asymptotic_r = math.ceil((6.0 / eps) ** 4)
    norm = operator_norm(t)
    if norm == 0.0:
        return PavingResult(((*range(n),),), np.zeros(1), eps, 1, 0.0, False, asymptotic_r)

    tn = t / norm
    tn[np.diag_indices(n)] = 0.0
    labels = []
    notes = []
    for sign in (1.0, -1.0):
        us = gram_vectors(dilation(sign * tn))
        res = partition_r(us, r, tol=1e-8)
        notes.extend(w for w in res.warnings if w not in notes)
        lab = np.empty(2 * n, dtype=int)
        for k, part in enumerate(res.parts):
            lab[list(part)] = k
        labels.append(lab[:n])
    groups: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        groups.setdefault((labels[0][i], labels[1][i]), []).append(i)
    parts = tuple(sorted(tuple(g) for g in groups.values()))
    ratios = np.array([operator_norm(tn[np.ix_(p, p)]) for p in parts])

    certified = 2.0 * inner_paving_bound(r) - 1.0
    vacuous = certified >= 1.0
    if vacuous:
        notes.append(f"composed bound {certified:.6g} is vacuous for r = {r}; ratios are measured only")
    if r * r >= n:
        notes.append(f"r^2 = {r * r} >= n = {n}: singletons already pave")
    if asymptotic_r > n:
        notes.append(f"r = (6/eps)^4 = {asymptotic_r} exceeds n = {n}; the asymptotic claim is not exercised")
    return PavingResult(parts, ratios, eps, r, certified, vacuous, asymptotic_r, tuple(notes))


def paving_r_bound(n: int, eps: float) -> int:
    """Smallest ``r`` with ``r >= N / (sqrt(1 + eps) - 1)^2``."""
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise BadParameters("N must be an even integer >= 2")
    if not eps > 0:
        raise BadParameters("eps must be positive")
    gap = math.sqrt(1.0 + eps) - 1.0
    r = math.ceil(n / gap**2)
    # guard against ceil landing one too high on an exact integer
    if r - 1 >= 1 and (r - 1) * gap**2 >= n * (1 - 1e-15):
        r -= 1
    return r


def paving_r_simplified(n: int, eps: float) -> int:
    """The simpler sufficient choice ``ceil(6 N / eps^2)``, valid for ``eps <= 1``."""
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise BadParameters("N must be an even integer >= 2")
    if not 0 < eps <= 1:
        raise BadParameters("the simplified bound needs 0 < eps <= 1")
    return math.ceil(6 * n / eps**2)


@dataclass
class TreeFailure:
    path: tuple[int, ...]
    check: str
    slack: float


@dataclass
class TreeReport:
    nodes_checked: int = 0
    max_sum_deviation: float = 0.0
    failures: list[TreeFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def tree_size(specs: Sequence[RandomVectorSpec], depth_limit: int | None = None) -> int:
    """Number of internal nodes down to ``depth_limit``."""
    m = len(specs) if depth_limit is None else min(depth_limit, len(specs))
    total, width = 0, 1
    for k in range(m):
        total += width
        width *= sum(1 for p in specs[k].probs if p > 0)
    return total


def verify_interlacing_tree(
    specs: Sequence[RandomVectorSpec],
    depth_limit: int | None = None,
    budget: int = TREE_BUDGET,
    sum_tol: float = 1e-9,
    seed: int = 0,
) -> TreeReport:
    """Check the interlacing-family property node by node.

    At every internal node the children (with probability prefactors) must
    sum to the parent coefficientwise and pass the common-interlacing
    falsification test.
    """
    specs = list(specs)
    if not specs:
        raise DimensionMismatch("need at least one random vector")
    size = tree_size(specs, depth_limit)
    if size > budget:
        raise BudgetExceeded(f"tree has {size} internal nodes, budget is {budget}")
    depth = len(specs) if depth_limit is None else min(depth_limit, len(specs))
    covs = [covariance(s) for s in specs]
    report = TreeReport()

    def visit(path: tuple[int, ...], fixed: list, weight: float, parent: RealPoly):
        k = len(path)
        report.nodes_checked += 1
        kids = []
        for j, (w, p) in enumerate(specs[k].atoms()):
            if p > 0:
                kids.append((j, w, weight * p, weight * p * tree_polynomial(fixed + [w], covs[k + 1:])))
        total = sum((c[3] for c in kids), RealPoly([]))
        diff = (total - parent).scale() / max(parent.scale(), 1e-300)
        report.max_sum_deviation = max(report.max_sum_deviation, diff)
        if diff > sum_tol:
            report.failures.append(TreeFailure(path, "children-sum", sum_tol - diff))
        if not common_interlacing_check([c[3] for c in kids], seed=seed):
            report.failures.append(TreeFailure(path, "common-interlacing", -1.0))
        if k + 1 < depth:
            for j, w, wt, q in kids:
                visit(path + (j,), fixed + [w], wt, q)

    visit((), [], 1.0, mixed_charpoly(covs))
    return report
