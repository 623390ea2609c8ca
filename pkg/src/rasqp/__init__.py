"""Active-set solvers and benchmarks for nonnegativity-constrained convex QPs.

The problem solved throughout is ``min 0.5 x'Qx + g'x  s.t. x >= 0`` with Q
symmetric positive definite.  See :mod:`rasqp.solvers` for the methods,
:mod:`rasqp.generators` for the benchmark families and :mod:`rasqp.bench`
for the harness; ``rasqp --help`` for the command line.
"""

from .engine import ChangeProbabilities, exchange_asymmetry_montecarlo
from .generators import GeneratorSpec, gen_easy, gen_hard, gen_medium, generate
from .model import (
    KktPoint,
    NotPositiveDefiniteError,
    NotSymmetricError,
    QpProblem,
    SolveResult,
    Status,
    kkt_residual,
    objective,
    validate_problem,
)
from .solvers import (
    GenericRasConfig,
    KrConfig,
    RasConfig,
    brute_force_solve,
    fletcher_solve,
    generic_ras_solve,
    kr_solve,
    ras_solve,
)

__version__ = "0.1.0"

__all__ = [
    "ChangeProbabilities",
    "exchange_asymmetry_montecarlo",
    "GeneratorSpec",
    "gen_easy",
    "gen_medium",
    "gen_hard",
    "generate",
    "KktPoint",
    "NotPositiveDefiniteError",
    "NotSymmetricError",
    "QpProblem",
    "SolveResult",
    "Status",
    "kkt_residual",
    "objective",
    "validate_problem",
    "GenericRasConfig",
    "KrConfig",
    "RasConfig",
    "brute_force_solve",
    "fletcher_solve",
    "generic_ras_solve",
    "kr_solve",
    "ras_solve",
    "__version__",
]
