"""Why exchanging indexes *into* the working set deserves a high probability.

Random 2x2 instances are pushed through the two extreme one-step
transitions of a full exchange at tol = 0:

* shrink: both variables inactive and infeasible -> both leave; afterwards
  N1 = #{i : g_i < 0} indexes are infeasible (possible only when Q12 < 0).
* grow: both variables active and infeasible -> both enter; afterwards
  N2 = #{i : x_i <= 0} are infeasible (possible only when Q12 > 0).

The Monte Carlo below shows E(N1) < E(N2) by a wide margin: shrinking the
working set cleans up more reliably than growing it, which is why the tuned
exchange probabilities treat the two directions asymmetrically.  With a
diagonal Q both counts vanish identically.
"""

import numpy as np

from rasqp import exchange_asymmetry_montecarlo

for samples in (10**3, 10**4, 10**5, 10**6):
    e1, e2, stderr = exchange_asymmetry_montecarlo(samples, np.random.default_rng(0))
    margin = (e2 - e1) / stderr
    print(f"samples={samples:>9,}: E(N1)={e1:.4f}  E(N2)={e2:.4f}  "
          f"stderr={stderr:.2e}  separation={margin:6.1f} sigma")

e1, e2, stderr = exchange_asymmetry_montecarlo(
    10**5, np.random.default_rng(0), diagonal_only=True
)
print(f"\ndiagonal Q (Q12 = 0): E(N1)={e1}  E(N2)={e2}  (both exactly zero)")
