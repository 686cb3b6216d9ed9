"""Split Weaver-type vector families into two halves and compare with the constant 16.

Each instance is a family of vectors with frame operator ``eta I`` and every
squared norm at most one. The greedy two-way split is run and the larger
half-norm is printed next to the certified bound ``eta (1/sqrt(2) + 1/sqrt(eta))^2``.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from interlacing.generators import weaver_instance, weaver_scalar_instance
from interlacing.solver import quadratic_form_spot_check, weaver_bound, weaver_partition


@dataclass
class WeaverConfig:
    eta: int = 18
    d: int = 2
    instances: int = 5
    scalar_size: int = 30
    seed: int = 0


def run(cfg: WeaverConfig) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(cfg.instances):
        for kind, ws in (
            ("frame", weaver_instance(rng, cfg.eta, cfg.d)),
            ("scalar", weaver_scalar_instance(rng, cfg.eta, cfg.scalar_size)),
        ):
            start = time.perf_counter()
            res = weaver_partition(ws, cfg.eta)
            rows.append({
                "instance": i,
                "kind": kind,
                "vectors": len(ws),
                "max_half_norm": float(np.max(res.part_norms)),
                "bound": res.certified_bound,
                "spot_check": quadratic_form_spot_check(ws, res.parts),
                "seconds": time.perf_counter() - start,
            })
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(WeaverConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = WeaverConfig(**vars(ap.parse_args()))
    print(f"eta={cfg.eta}  certified bound={weaver_bound(cfg.eta):.4f}")
    print(f"{'inst':>4} {'kind':>6} {'m':>4} {'max half':>10} {'spot':>10} {'sec':>6}")
    for row in run(cfg):
        print(f"{row['instance']:>4} {row['kind']:>6} {row['vectors']:>4} "
              f"{row['max_half_norm']:>10.4f} {row['spot_check']:>10.4f} {row['seconds']:>6.2f}")


if __name__ == "__main__":
    main()
