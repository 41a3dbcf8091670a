"""Small deterministic Nelder-Mead simplex minimizer.

Kept dependency free so optimization results are reproducible bit for bit
across environments.  Standard reflection/expansion/contraction/shrink
coefficients; ties are broken by stable sorting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimplexResult:
    point: np.ndarray
    value: float
    evaluations: int
    converged: bool


def nelder_mead(
    fn,
    start,
    initial_step: float = 0.5,
    fatol: float = 1e-13,
    xatol: float = 1e-8,
    max_evals: int = 600,
) -> SimplexResult:
    x0 = np.asarray(start, dtype=float)
    dim = x0.shape[0]
    points = [x0.copy()]
    for i in range(dim):
        p = x0.copy()
        p[i] += initial_step
        points.append(p)
    evals = 0

    def call(p):
        nonlocal evals
        evals += 1
        return float(fn(p))

    values = [call(p) for p in points]

    while evals < max_evals:
        order = np.argsort(values, kind="stable")
        points = [points[i] for i in order]
        values = [values[i] for i in order]
        if (
            abs(values[-1] - values[0]) <= fatol
            and max(np.max(np.abs(p - points[0])) for p in points[1:]) <= xatol
        ):
            return SimplexResult(points[0], values[0], evals, True)

        centroid = np.mean(points[:-1], axis=0)
        worst = points[-1]
        reflected = centroid + (centroid - worst)
        fr = call(reflected)
        if values[0] <= fr < values[-2]:
            points[-1], values[-1] = reflected, fr
        elif fr < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            fe = call(expanded)
            if fe < fr:
                points[-1], values[-1] = expanded, fe
            else:
                points[-1], values[-1] = reflected, fr
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            fc = call(contracted)
            if fc < values[-1]:
                points[-1], values[-1] = contracted, fc
            else:
                best = points[0]
                points = [best] + [best + 0.5 * (p - best) for p in points[1:]]
                values = [values[0]] + [call(p) for p in points[1:]]

    order = np.argsort(values, kind="stable")
    return SimplexResult(points[order[0]], values[order[0]], evals, False)
