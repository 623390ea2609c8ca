"""Solve one small problem with every method and inspect the result.

The instance

    minimize 0.5 * x'Qx + g'x   subject to x >= 0

with Q = [[4, 1], [1, 3]] and g = (-1, -2) has the interior minimizer
x* = (1/11, 7/11), so every solver should land on it exactly.
"""

import numpy as np

from rasqp import (
    GenericRasConfig,
    KrConfig,
    QpProblem,
    RasConfig,
    brute_force_solve,
    fletcher_solve,
    generic_ras_solve,
    kkt_residual,
    kr_solve,
    ras_solve,
)

problem = QpProblem([[4.0, 1.0], [1.0, 3.0]], [-1.0, -2.0])

runs = {
    "ras": ras_solve(problem, RasConfig(seed=0)),
    "generic": generic_ras_solve(problem, GenericRasConfig(seed=0)),
    "kr": kr_solve(problem, KrConfig()),
    "fletcher": fletcher_solve(problem),
}

print(f"{'solver':<10}{'status':<10}{'solves':>7}{'objective':>14}  x")
for name, result in runs.items():
    x = ", ".join(f"{v:.6f}" for v in result.point.x)
    print(f"{name:<10}{result.status.value:<10}{result.solves:>7}"
          f"{result.objective:>14.8f}  ({x})")

oracle = brute_force_solve(problem)
print(f"\nbrute-force oracle (all 2^n partitions): x = {oracle.x}")

stationarity, primal, dual, comp = kkt_residual(problem, runs["ras"].point)
print("\nKKT residuals of the randomized run:")
print(f"  ||Qx + g - s||_inf = {stationarity:.2e}")
print(f"  primal violation    = {primal}")
print(f"  dual violation      = {dual}")
print(f"  x's (exact zero)    = {comp}")

worst = max(np.abs(r.point.x - oracle.x).max() for r in runs.values())
print(f"\nworst deviation from the oracle across solvers: {worst:.2e}")
