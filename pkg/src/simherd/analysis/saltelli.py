"""Saltelli cross-sampling for variance-based sensitivity analysis.

For D factors and N base points the sample has N*(2D+2) rows, laid out
per base point j as

    A_j,  AB_j^1 .. AB_j^D,  BA_j^1 .. BA_j^D,  B_j

where AB_j^i is A_j with coordinate i taken from B_j and BA_j^i is the
converse. A_j/B_j come from the first and second halves of a point of the
2D-dimensional Sobol' sequence, scaled into the problem bounds; a seeded
uniform sampler is available as a fallback for parity testing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..prng import Xoshiro256
from .sobolseq import MAX_DIM, sobol_points


@dataclass
class SobolProblem:
    num_vars: int
    names: list[str]
    bounds: list[tuple[float, float]]

    @classmethod
    def coerce(cls, problem) -> "SobolProblem":
        if isinstance(problem, cls):
            p = problem
        else:
            try:
                p = cls(
                    num_vars=int(problem["num_vars"]),
                    names=list(problem["names"]),
                    bounds=[tuple(b) for b in problem["bounds"]],
                )
            except (KeyError, TypeError) as exc:
                raise ValueError(f"not a sensitivity problem: {exc}") from exc
        if p.num_vars < 1:
            raise ValueError("num_vars must be positive")
        if len(p.names) != p.num_vars or len(p.bounds) != p.num_vars:
            raise ValueError("names and bounds must both have num_vars entries")
        for lo, hi in p.bounds:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad bounds ({lo}, {hi})")
        return p


def saltelli_sample(problem, n: int, sampler: str = "sobol", seed: int = 0) -> np.ndarray:
    """N*(2D+2) x D matrix of parameter rows in the block layout above."""
    p = SobolProblem.coerce(problem)
    if n < 1:
        raise ValueError("need at least one base point")
    d = p.num_vars
    if sampler == "sobol":
        if 2 * d > MAX_DIM:
            raise ValueError(f"sobol sampler supports up to {MAX_DIM // 2} factors")
        base = sobol_points(n, 2 * d)
    elif sampler == "uniform":
        rng = Xoshiro256(seed)
        base = np.array([[rng.random() for _ in range(2 * d)] for _ in range(n)])
    else:
        raise ValueError(f"unknown sampler {sampler!r}")

    lo = np.array([b[0] for b in p.bounds])
    span = np.array([b[1] - b[0] for b in p.bounds])
    a = lo + base[:, :d] * span
    b = lo + base[:, d:] * span

    block = 2 * d + 2
    out = np.empty((n * block, d))
    out[0::block] = a
    out[block - 1 :: block] = b
    for i in range(d):
        ab = a.copy()
        ab[:, i] = b[:, i]
        out[1 + i :: block] = ab
        ba = b.copy()
        ba[:, i] = a[:, i]
        out[1 + d + i :: block] = ba
    return out
