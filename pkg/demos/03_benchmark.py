"""A desk-scale benchmark: solve counts vs conditioning on the hard family.

Runs the randomized solver and the deterministic full-exchange method on
dense problems of growing condition number.  The full exchange is fast while
it works but starts cycling as the conditioning degrades; the randomized
method keeps terminating, paying only a modest number of extra solves.

Equivalent CLI:
    rasqp bench --family hard --n 300 --cond 1e6,1e10,1e14 --trials 5
"""

from rasqp.bench import BenchmarkPlan, emit_table, run_plan
from rasqp.generators import GeneratorSpec

cells = []
for cond in (1e6, 1e10, 1e14):
    spec = GeneratorSpec("hard", 300, seed=0, cond=cond)
    cells += [(spec, "ras", {}), (spec, "kr", {})]

records = run_plan(BenchmarkPlan(cells=tuple(cells), trials=5))
human, machine = emit_table(records)
print(human)
print("('fail' counts trials that cycled, hit an iteration cap or timed out;")
print(" failed trials are excluded from the means.)")

print("\nfirst machine-readable rows (one CSV line per trial):")
for line in machine.splitlines()[:4]:
    print(" ", line)
