"""Iteration traces: how the infeasible count evolves per subsystem solve.

On an ill-conditioned medium-family instance the full-exchange method walks
into a cycle, while the randomized method's infeasible count falls
non-monotonically — it may rise after an unlucky exchange — yet reaches zero.

Equivalent CLI:
    rasqp trace --family medium --n 500 --density 0.01 --cond 1e10 --solver ras
"""

from rasqp import KrConfig, RasConfig, kr_solve, ras_solve
from rasqp.bench import solver_seed_for_trial
from rasqp.generators import gen_medium


def show(label, result, limit=40):
    counts = [row.infeasible for row in result.trace]
    rises = sum(b > a for a, b in zip(counts, counts[1:]))
    print(f"{label}: status={result.status.value}, solves={result.solves}, "
          f"avg subsystem size={result.avg_subsystem_size:.1f}")
    shown = " ".join(str(c) for c in counts[:limit])
    tail = " ..." if len(counts) > limit else ""
    print(f"  infeasible counts: {shown}{tail}")
    print(f"  increases along the way: {rises}\n")


print("medium family, n=500, density=0.01, cond=1e10")
problem = gen_medium(500, 0.01, 1e10, seed=1)
show("randomized exchange",
     ras_solve(problem, RasConfig(seed=solver_seed_for_trial(1), tol=1e-10)))

print("medium family, n=30, density=0.5, cond=1e12 (a cycling instance)")
small = gen_medium(30, 0.5, 1e12, seed=6)
show("full exchange", kr_solve(small, KrConfig(tol=1e-10)))
show("randomized exchange", ras_solve(small, RasConfig(seed=0, tol=1e-10)))
