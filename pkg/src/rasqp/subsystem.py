"""Reduced KKT subsystem solves.

For a partition of {0..n-1} into an inactive set I and an active set A, the
candidate point fixes x_A = 0 and solves

    Q[I,I] x_I = -g[I],        s_A = Q[A,I] x_I + g[A],

with s_I = 0.  Q[I,I] is a principal submatrix of a positive definite matrix,
hence positive definite, and is factorized fresh on every call (no rank-one
updating); the per-call cost is exactly what the benchmark ``solve`` metric
counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .model import KktPoint, QpProblem

__all__ = [
    "SubsystemSolution",
    "FactorizationError",
    "solve_subsystem",
    "embed_point",
    "DENSE_THRESHOLD",
]

#: Sparse-stored Q[I,I] blocks up to this size are densified before
#: factorization; larger blocks go through a sparse LU with fill-reducing
#: ordering (SuperLU), since SciPy ships no sparse Cholesky.
DENSE_THRESHOLD = 1024


class FactorizationError(RuntimeError):
    """The subsystem matrix could not be factorized (numerically indefinite)."""


@dataclass(frozen=True)
class SubsystemSolution:
    """Values on I and A for one subsystem solve: x_I, s_A and |I|."""

    x_I: np.ndarray
    s_A: np.ndarray
    subsystem_size: int


def _check_partition(n: int, I: np.ndarray, A: np.ndarray) -> None:
    if len(I) + len(A) != n or len(np.union1d(I, A)) != n:
        raise ValueError("I and A must partition {0..n-1}")
    if (len(I) and (I[0] < 0 or I[-1] >= n)) or (len(A) and (A[0] < 0 or A[-1] >= n)):
        raise ValueError("index out of range")


def solve_subsystem(
    problem: QpProblem,
    I,
    A,
    *,
    dense_threshold: int = DENSE_THRESHOLD,
) -> SubsystemSolution:
    """Solve Q[I,I] x_I = -g[I] by Cholesky and back out s_A.

    ``I`` and ``A`` must partition {0..n-1}; they are sorted internally, so
    the caller's ordering does not affect the result.  With I empty the
    solution is x_I = [] and s_A = g.  No counters are touched here — callers
    count solves.

    Raises :class:`FactorizationError` when the factorization fails, which
    cannot happen in exact arithmetic for a positive definite Q.
    """
    I = np.sort(np.asarray(I, dtype=np.int64))
    A = np.sort(np.asarray(A, dtype=np.int64))
    _check_partition(problem.n, I, A)
    g = problem.g
    if len(I) == 0:
        return SubsystemSolution(np.empty(0), g[A].copy(), 0)

    Q = problem.Q
    if problem.is_sparse:
        cols = Q[:, I]  # csc column slice, reused for both Q[I,I] and s_A
        qii = cols[I, :]
        if len(I) <= dense_threshold:
            x_I = _dense_solve(qii.toarray(), g[I])
        else:
            x_I = _sparse_solve(qii, g[I])
        s_A = (cols @ x_I)[A] + g[A] if len(A) else np.empty(0)
    else:
        x_I = _dense_solve(Q[np.ix_(I, I)], g[I])
        s_A = Q[np.ix_(A, I)] @ x_I + g[A] if len(A) else np.empty(0)
    return SubsystemSolution(x_I, s_A, len(I))


def _dense_solve(qii: np.ndarray, g_I: np.ndarray) -> np.ndarray:
    try:
        c = sla.cho_factor(qii, lower=True, check_finite=False)
    except sla.LinAlgError as exc:
        raise FactorizationError(str(exc)) from exc
    return sla.cho_solve(c, -g_I, check_finite=False)


def _sparse_solve(qii, g_I: np.ndarray) -> np.ndarray:
    try:
        lu = spla.splu(sp.csc_matrix(qii))
    except RuntimeError as exc:  # SuperLU signals singularity this way
        raise FactorizationError(str(exc)) from exc
    x = lu.solve(-g_I)
    if not np.all(np.isfinite(x)):
        raise FactorizationError("sparse factorization produced non-finite values")
    return x


def embed_point(n: int, I, A, sol: SubsystemSolution) -> KktPoint:
    """Scatter a subsystem solution into full-length vectors.

    x gets x_I on I and exact zeros on A; s gets s_A on A and exact zeros on
    I, so x's = 0 structurally.  As in :func:`solve_subsystem`, index sets
    are sorted internally and the solution vectors are taken in sorted order,
    so any permutation of I yields the same embedded point.
    """
    I = np.sort(np.asarray(I, dtype=np.int64))
    A = np.sort(np.asarray(A, dtype=np.int64))
    if len(sol.x_I) != len(I) or len(sol.s_A) != len(A):
        raise ValueError("solution does not match the partition sizes")
    x = np.zeros(n)
    s = np.zeros(n)
    x[I] = sol.x_I
    s[A] = sol.s_A
    return KktPoint(x=x, s=s)
