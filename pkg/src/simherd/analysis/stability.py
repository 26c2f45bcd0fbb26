"""Dual-population stability score.

Scores how steady a sheep/wolf run was, from the two population series
sampled once per tick (tick 0 first). Per tick t >= 1 each species
contributes

    E_t = step(P_t) / (|P_t - P_{t-1}| + 1e-6)

where step(P) is 0 for an extinct population and 1 otherwise, so a dead
species adds nothing and a perfectly flat live series contributes 1e6.
The score is the mean over t = 1..k of (E_sheep + E_wolf) / 2; the tick-0
row has no derivative and is excluded from the mean. Bounds: [0, 1e6].
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

EPSILON = 1e-6


def stability_score(sheep: Sequence[float], wolves: Sequence[float]) -> float:
    s = np.asarray(sheep, dtype=float)
    w = np.asarray(wolves, dtype=float)
    if s.ndim != 1 or w.ndim != 1 or s.shape != w.shape:
        raise ValueError("sheep and wolf series must be 1-d and equally long")
    if s.size < 2:
        raise ValueError("need at least two ticks to form a derivative")
    if not (np.isfinite(s).all() and np.isfinite(w).all()):
        raise ValueError("population series must be finite")
    if (s < 0).any() or (w < 0).any():
        raise ValueError("populations cannot be negative")

    es = np.where(s[1:] == 0, 0.0, 1.0 / (np.abs(np.diff(s)) + EPSILON))
    ew = np.where(w[1:] == 0, 0.0, 1.0 / (np.abs(np.diff(w)) + EPSILON))
    return float(np.mean((es + ew) / 2.0))
