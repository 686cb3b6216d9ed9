"""Empirical look at which isotropic families push the largest root of mu highest.

For a trace budget ``eps`` the candidate extremal family uses ``floor(d/eps)``
copies of ``eps I / d``, one smaller multiple of the identity for the
remainder, and nothing else. This script compares its largest root with
random families meeting the same hypotheses and with the closed-form bound
``(1 + sqrt(eps))^2``. Nothing is asserted: it only reports what it finds.

When every matrix is ``I / m`` the mixed characteristic polynomial is a
scaled associated Laguerre polynomial, which is checked against scipy.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_genlaguerre

from interlacing.mixedchar import mixed_charpoly
from interlacing.upoly import max_root


@dataclass
class ProbeConfig:
    d: int = 3
    eps: float = 0.5
    trials: int = 200
    seed: int = 0


def extremal_family(d: int, eps: float) -> list[np.ndarray]:
    full = math.floor(d / eps + 1e-12)
    mats = [eps * np.eye(d) / d] * full
    rest = d - full * eps
    if rest > 1e-12:
        mats.append(rest * np.eye(d) / d)
    return mats


def random_family(rng: np.random.Generator, d: int, eps: float) -> list[np.ndarray]:
    """Rejection-sampled ``A_i`` with ``sum A_i = I`` and ``trace A_i <= eps``."""
    # leave room above d / eps so that rejection accepts in a few draws
    m = math.ceil(1.5 * d / eps) + int(rng.integers(0, 3))
    k = int(rng.integers(1, 3))
    while True:
        g = rng.standard_normal((m * k, d)) + 1j * rng.standard_normal((m * k, d))
        q = np.linalg.qr(g)[0]
        mats = [q[i * k:(i + 1) * k].conj().T @ q[i * k:(i + 1) * k] for i in range(m)]
        if max(np.trace(a).real for a in mats) <= eps:
            return mats


def laguerre_check(d: int, m: int) -> float:
    """Distance between the roots of ``mu[I/m, ...]`` and those of ``L_d^{m-d}(m x)``."""
    mu = mixed_charpoly([np.eye(d) / m] * m)
    ours = np.sort(np.roots(mu.coeffs[::-1]).real)
    lag = np.sort(roots_genlaguerre(d, m - d)[0] / m)
    return float(np.max(np.abs(ours - lag)))


def run(cfg: ProbeConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    conj = max_root(mixed_charpoly(extremal_family(cfg.d, cfg.eps)))
    best = -math.inf
    for _ in range(cfg.trials):
        best = max(best, max_root(mixed_charpoly(random_family(rng, cfg.d, cfg.eps))))
    return {
        "conjectured_extremal_root": conj,
        "best_random_root": best,
        "random_exceeds_conjecture": best > conj + 1e-9,
        "bound": (1 + math.sqrt(cfg.eps)) ** 2,
        "laguerre_root_gap": laguerre_check(cfg.d, max(cfg.d, math.ceil(cfg.d / cfg.eps))),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=ProbeConfig.d)
    ap.add_argument("--eps", type=float, default=ProbeConfig.eps)
    ap.add_argument("--trials", type=int, default=ProbeConfig.trials)
    ap.add_argument("--seed", type=int, default=ProbeConfig.seed)
    cfg = ProbeConfig(**vars(ap.parse_args()))
    for key, val in run(cfg).items():
        print(f"{key:28s} {val}")


if __name__ == "__main__":
    main()
