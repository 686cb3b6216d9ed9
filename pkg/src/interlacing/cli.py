"""Command-line front end.

Every subcommand reads a schema-1 JSON instance, runs one library routine and
prints a JSON report. Exit codes: 0 when every check passes, 2 for unreadable
or malformed input, 3 when a precondition fails, 4 when a check fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import warnings

import numpy as np

from . import instances
from .barrier import run_barrier_trace
from .errors import ParseError, PreconditionError, SchemaError, UnknownSuite
from .identities import identity_suite
from .mixedchar import (
    MAX_OUTCOMES,
    RandomVectorSpec,
    as_covariances,
    brute_force_expected_charpoly,
    covariance,
    mixed_charpoly,
)
from .mpoly import det_poly, stability_falsifier
from .solver import (
    IsotropyWarning,
    partition_r,
    pave,
    quadratic_form_spot_check,
    verify_interlacing_tree,
    weaver_partition,
)
from .upoly import REAL_ROOT_TOL, RealPoly, is_real_rooted, max_imag_ratio, max_root, roots

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_CHECK = 0, 2, 3, 4
SUITES = ("identities", "tree", "oracle", "stability")
ORACLE_OUTCOME_LIMIT = 10**5


class Report:
    def __init__(self, command: str, digest: str):
        self.command = command
        self.digest = digest
        self.certified_bound: float | None = None
        self.achieved: list[float] = []
        self.checks: list[dict] = []
        self.warnings: list[str] = []
        self.details: dict = {}

    def check(self, name: str, slack: float) -> None:
        """Record a check that passes iff ``slack >= 0``."""
        slack = float(slack)
        self.checks.append({"name": name, "pass": slack >= 0, "slack": slack})

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": self.digest,
            "certified_bound": self.certified_bound,
            "achieved": [float(a) for a in self.achieved],
            "checks": self.checks,
            "warnings": self.warnings,
            "details": self.details,
        }


def _digest(command: str, inst: instances.Instance | None, args: argparse.Namespace) -> str:
    h = hashlib.sha256()
    h.update(command.encode())
    if inst is not None:
        h.update(instances.emit(inst).encode())
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("input", "csv", "func", "command")}
    h.update(json.dumps(flags, sort_keys=True, default=str).encode())
    return h.hexdigest()


def _write_csv(path: str, poly: RealPoly) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in poly.coeffs:
            fh.write(f"{c:.17g}\n")


def _need(inst: instances.Instance, *kinds: str) -> None:
    if inst.kind not in kinds:
        raise SchemaError(f"this command needs kind in {kinds}, got {inst.kind!r}")


def _covariances(inst: instances.Instance):
    if inst.kind == "covariances":
        return list(inst.data)
    return [covariance(s) for s in inst.specs()]


def _root_list(p: RealPoly) -> list[float]:
    return [float(z.real) for z in roots(p)] if p.degree >= 1 else []


def _oracle_deviation(specs: list[RandomVectorSpec]) -> float:
    mu = mixed_charpoly([covariance(s) for s in specs])
    brute = brute_force_expected_charpoly(specs)
    width = max(len(mu.coeffs), len(brute.coeffs))
    a, b = np.zeros(width), np.zeros(width)
    a[: len(mu.coeffs)] = mu.coeffs
    b[: len(brute.coeffs)] = brute.coeffs
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))


def _outcomes(specs) -> int:
    return math.prod(s.support_size for s in specs)


def cmd_mixed_charpoly(inst, args, rep: Report) -> None:
    _need(inst, "covariances", "random_vectors")
    mu = mixed_charpoly(_covariances(inst))
    rep.achieved = mu.coeffs.tolist()
    rep.details["roots"] = _root_list(mu)
    rep.details["max_root"] = max_root(mu) if mu.degree >= 1 else None
    rep.check("real-rooted", REAL_ROOT_TOL - max_imag_ratio(mu))
    if inst.kind == "random_vectors":
        specs = inst.specs()
        if _outcomes(specs) <= ORACLE_OUTCOME_LIMIT:
            tol = args.tol if args.tol is not None else 1e-9
            rep.check("oracle-agreement", tol - _oracle_deviation(specs))
        else:
            rep.warnings.append("support too large for the brute-force oracle")
    if args.csv:
        _write_csv(args.csv, mu)


def _vectors(inst) -> list[np.ndarray]:
    _need(inst, "vectors")
    return list(inst.data)


def _partition_details(rep: Report, res) -> None:
    rep.achieved = res.part_norms.tolist()
    rep.details["parts"] = [list(p) for p in res.parts]
    rep.details["delta"] = res.delta
    rep.details["r"] = res.r
    if res.leaf is not None:
        rep.details["path_roots"] = list(res.leaf.path_roots)
    rep.warnings.extend(res.warnings)


def cmd_partition(inst, args, rep: Report) -> None:
    us = _vectors(inst)
    r = args.r if args.r is not None else 2
    tol = args.tol if args.tol is not None else 1e-8
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IsotropyWarning)
        res = partition_r(us, r, tol=tol, require_isotropic=False)
    _partition_details(rep, res)
    rep.certified_bound = res.certified_bound
    if res.certified_bound is not None:
        rep.check("part-norm-bound", res.slack + 1e-8)


def cmd_weaver(inst, args, rep: Report) -> None:
    ws = _vectors(inst)
    eta = args.eta if args.eta is not None else 18.0
    res = weaver_partition(ws, eta)
    _partition_details(rep, res)
    rep.certified_bound = res.certified_bound
    rep.details["vacuous"] = res.vacuous
    rep.check("part-norm-bound", res.slack + 1e-8)
    spot = quadratic_form_spot_check(ws, res.parts, seed=args.seed)
    rep.details["max_quadratic_form"] = spot
    rep.check("quadratic-form-spot-check", res.certified_bound + 1e-6 - spot)


def cmd_pave(inst, args, rep: Report) -> None:
    _need(inst, "matrix")
    eps = args.eps if args.eps is not None else 0.5
    res = pave(inst.data, eps, args.r)
    rep.achieved = res.ratios.tolist()
    rep.details.update(
        parts=[list(p) for p in res.parts],
        r=res.r_used,
        r_squared=res.r_used**2,
        n_parts=res.n_parts,
        composed_ratio_bound=res.certified_ratio,
        vacuous=res.vacuous,
        asymptotic_r=res.asymptotic_r,
        meets_epsilon=res.meets_epsilon,
    )
    rep.warnings.extend(res.warnings)
    if not res.vacuous:
        rep.certified_bound = res.certified_ratio
        rep.check("composed-ratio-bound", res.certified_ratio + 1e-8 - res.max_ratio)


def cmd_barrier_trace(inst, args, rep: Report) -> None:
    _need(inst, "covariances", "random_vectors")
    mats = as_covariances(_covariances(inst))
    eps = args.eps if args.eps is not None else max(float(np.trace(a).real) for a in mats)
    tr = run_barrier_trace(mats, eps)
    rep.certified_bound = tr.bound
    rep.achieved = [tr.final_root]
    rep.details.update(
        epsilon=eps, t=tr.t, delta=tr.delta, phi=tr.phi, symbolic=tr.symbolic,
        final_poly_agreement=tr.final_poly_agreement,
        steps=[
            {"k": s.k, "point": s.point.tolist(), "barriers": s.barrier_values.tolist(),
             "above_roots": s.above_roots}
            for s in tr.steps
        ],
    )
    rep.check("root-bound", tr.bound + 1e-8 - tr.final_root)
    if tr.steps:
        rep.check("barrier-below-phi", tr.phi + 1e-8 - max(s.max_barrier for s in tr.steps))
        rep.check("above-roots", 0.0 if tr.above_ok else -1.0)
        rep.check("final-polynomial", 1e-9 - tr.final_poly_agreement)
    else:
        rep.warnings.append("instance too large for the symbolic trace; endpoint only")


def _random_specs(rng, m: int, d: int, support: int) -> list[RandomVectorSpec]:
    out = []
    for _ in range(m):
        vals = rng.standard_normal((support, d)) + 1j * rng.standard_normal((support, d))
        out.append(RandomVectorSpec(vals, rng.dirichlet(np.ones(support))))
    return out


def _suite_specs(inst, rng) -> list[RandomVectorSpec]:
    if inst is None:
        return _random_specs(rng, 3, 2, 2)
    return inst.specs()


def cmd_verify(inst, args, rep: Report) -> None:
    suite = args.suite
    if suite not in SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {SUITES}")
    rng = np.random.default_rng(args.seed)
    rep.details["suite"] = suite
    if suite == "identities":
        tol = args.tol if args.tol is not None else 1e-8
        for res in identity_suite(seed=args.seed, tol=tol):
            rep.check(res.name, res.slack)
            rep.achieved.append(res.worst_ratio)
    elif suite == "tree":
        report = verify_interlacing_tree(_suite_specs(inst, rng), seed=args.seed)
        rep.details["nodes_checked"] = report.nodes_checked
        rep.achieved = [report.max_sum_deviation]
        rep.check("children-sum", 1e-9 - report.max_sum_deviation)
        failed = [f for f in report.failures if f.check == "common-interlacing"]
        rep.check("common-interlacing", -1.0 if failed else 0.0)
        rep.details["failures"] = [
            {"path": list(f.path), "check": f.check, "slack": f.slack} for f in report.failures
        ]
    elif suite == "oracle":
        specs = _suite_specs(inst, rng)
        if _outcomes(specs) > MAX_OUTCOMES:
            raise PreconditionError("support too large for the brute-force oracle")
        dev = _oracle_deviation(specs)
        rep.achieved = [dev]
        rep.check("oracle-agreement", (args.tol if args.tol is not None else 1e-9) - dev)
    else:
        if inst is None:
            mats = [covariance(s) for s in _random_specs(rng, 3, 2, 2)]
        else:
            _need(inst, "covariances", "random_vectors")
            mats = _covariances(inst)
        mu = mixed_charpoly(mats)
        rep.check("mixed-charpoly-real-rooted", 0.0 if is_real_rooted(mu) else -1.0)
        witness = stability_falsifier(det_poly(as_covariances(mats)), seed=args.seed)
        rep.check("det-poly-stable", 0.0 if witness is None else -1.0)
        if witness is not None:
            rep.details["witness"] = [[w.real, w.imag] for w in witness]


COMMANDS = {
    "mixed-charpoly": cmd_mixed_charpoly,
    "partition": cmd_partition,
    "weaver": cmd_weaver,
    "pave": cmd_pave,
    "barrier-trace": cmd_barrier_trace,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interlace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?" if name == "verify" else None, help="instance JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None, help="override the check tolerance")
        p.add_argument("--csv", default=None, help="write polynomial coefficients here")
        if name in ("partition", "pave"):
            p.add_argument("--r", type=int, default=None)
        if name == "weaver":
            p.add_argument("--eta", type=float, default=None)
        if name in ("pave", "barrier-trace"):
            p.add_argument("--eps", type=float, default=None)
        if name == "verify":
            p.add_argument("--suite", default="identities")
    return parser


def run(argv=None) -> tuple[int, dict | None]:
    """Parse ``argv``, run the command, and return ``(exit code, report dict)``."""
    args = build_parser().parse_args(argv)
    for attr in ("r", "eta", "eps"):
        args.__dict__.setdefault(attr, None)
    try:
        inst = instances.load(args.input) if args.input else None
        rep = Report(args.command, _digest(args.command, inst, args))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            COMMANDS[args.command](inst, args, rep)
        rep.warnings.extend(str(w.message) for w in caught)
    except (ParseError, SchemaError, UnknownSuite) as exc:
        return EXIT_PARSE, {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
    except PreconditionError as exc:
        return EXIT_PRECONDITION, {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
    return (EXIT_OK if rep.ok else EXIT_CHECK), rep.to_dict()


def main(argv=None) -> int:
    code, report = run(argv)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
