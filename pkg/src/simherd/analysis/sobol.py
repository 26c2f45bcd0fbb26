"""First-order and total-order Sobol' index estimators.

Consumes model outputs evaluated on a Saltelli sample (see saltelli.py for
the row layout). Estimators, with V the variance of the pooled A/B outputs:

    S1_i = mean_j[ B_j * (AB_j^i - A_j) ] / V        (Saltelli 2010)
    ST_i = mean_j[ (A_j - AB_j^i)^2 ] / (2 V)        (Jansen)

Two derived views mirror the reporting format used by the calibration and
sensitivity workflows: ``s1_with_interactions`` appends 1 - sum(|S1|) so
the entries total one, and ``st_relative`` normalizes ST by its sum.
"""

from __future__ import annotations

import numpy as np

from .saltelli import SobolProblem


def sobol_analyze(problem, y) -> dict:
    p = SobolProblem.coerce(problem)
    y = np.asarray(y, dtype=float)
    d = p.num_vars
    block = 2 * d + 2
    if y.ndim != 1 or y.size == 0 or y.size % block:
        raise ValueError(
            f"output length must be divisible by 2*num_vars+2 = {block}, got {y.size}"
        )
    if not np.isfinite(y).all():
        raise ValueError("outputs must be finite")

    a = y[0::block]
    b = y[block - 1 :: block]
    v = float(np.var(np.concatenate([a, b])))
    if v == 0.0:
        raise ValueError("outputs have zero variance; indices are undefined")

    s1 = np.empty(d)
    st = np.empty(d)
    for i in range(d):
        ab = y[1 + i :: block]
        s1[i] = np.mean(b * (ab - a)) / v
        st[i] = 0.5 * np.mean((a - ab) ** 2) / v

    total = float(st.sum())
    if total == 0.0:
        # happens on tiny samples whose coordinate flips never move the
        # output: the relative shares are 0/0, not silently-NaN data
        raise ValueError("outputs are insensitive to every variable; indices are undefined")
    s1_abs = np.abs(s1)
    return {
        "S1": s1,
        "ST": st,
        "s1_with_interactions": [*s1_abs.tolist(), 1.0 - float(s1_abs.sum())],
        "st_relative": (st / total).tolist(),
    }
