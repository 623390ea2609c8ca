"""Active-set solvers for nonnegativity-constrained strictly convex QPs.

Four methods share the same metric semantics (``solves`` = number of reduced
KKT subsystem factorizations, ``avg_subsystem_size`` = mean |I| over them):

* :func:`generic_ras_solve` — randomized exchange with probabilities bounded
  away from 0 and 1 by a constant sigma; the simplest convergent scheme.
* :func:`ras_solve` — randomized exchange with six origin-dependent
  probabilities and a resampling rule for empty exchanges; the method of
  interest.
* :func:`kr_solve` — deterministic full exchange of all infeasible indexes;
  fast on easy problems but can cycle on ill-conditioned ones.
* :func:`fletcher_solve` — classical primal-feasible method moving one index
  at a time; finitely convergent, used as a deterministic baseline.

:func:`brute_force_solve` enumerates all 2^n partitions as a correctness
oracle for the others.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .engine import (
    ChangeProbabilities,
    History,
    Partition,
    categorize,
    classify,
    next_sets,
    select_exchange_generic,
    select_exchange_ras,
)
from .model import KktPoint, QpProblem, SolveResult, Status, TraceRow, objective
from .subsystem import FactorizationError, embed_point, solve_subsystem

__all__ = [
    "GenericRasConfig",
    "RasConfig",
    "KrConfig",
    "generic_ras_solve",
    "ras_solve",
    "kr_solve",
    "fletcher_solve",
    "brute_force_solve",
    "DimensionTooLargeError",
    "NoKktPointError",
]

@dataclass
class GenericRasConfig:
    """Configuration for :func:`generic_ras_solve`.

    ``probability_rule`` maps the current :class:`Partition` to a pair of
    probability vectors (for Im and Am); every produced probability must lie
    in [sigma, 1-sigma].  ``None`` means the constant rule 0.5.
    """

    sigma: float = 0.5
    probability_rule: Callable[[Partition], tuple] | None = None
    tol: float = 1e-10
    initial_A: object = None
    max_solves: int = 10_000
    seed: int = 0
    record_sets: bool = False


@dataclass
class RasConfig:
    """Configuration for :func:`ras_solve` (defaults are the tuned probabilities)."""

    probs: ChangeProbabilities = field(default_factory=ChangeProbabilities)
    tol: float = 1e-10
    initial_A: object = None
    max_solves: int = 10_000
    seed: int = 0
    record_sets: bool = False


@dataclass
class KrConfig:
    """Configuration for :func:`kr_solve`; the iteration cap treats one
    subsystem solve as one iteration."""

    tol: float = 1e-10
    initial_A: object = None
    max_iterations: int = 200
    record_sets: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


class DimensionTooLargeError(ValueError):
    """brute_force_solve refuses n > 20 (2^n subsystem solves)."""


class NoKktPointError(RuntimeError):
    """No partition satisfied the KKT conditions; impossible for valid input."""


def _initial_sets(n: int, initial_A) -> tuple[np.ndarray, np.ndarray]:
    if initial_A is None:
        A = np.arange(n, dtype=np.int64)
    else:
        A = np.unique(np.asarray(initial_A, dtype=np.int64))
        if len(A) and (A[0] < 0 or A[-1] >= n):
            raise ValueError("initial_A index out of range")
    return np.setdiff1d(np.arange(n, dtype=np.int64), A, assume_unique=True), A


class _RunRecorder:
    """Accumulates the per-solve metrics every solver reports."""

    def __init__(self, record_sets: bool):
        self.t0 = time.perf_counter()
        self.solves = 0
        self.size_total = 0
        self.trace: list[TraceRow] = []
        self.sets: list[np.ndarray] | None = [] if record_sets else None

    def note(self, partition: Partition) -> None:
        self.solves += 1
        self.size_total += len(partition.I)
        self.trace.append(
            TraceRow(
                iteration=self.solves,
                n_im=len(partition.Im),
                n_am=len(partition.Am),
                subsystem_size=len(partition.I),
                elapsed_s=time.perf_counter() - self.t0,
            )
        )
        if self.sets is not None:
            self.sets.append(partition.I.copy())

    def result(self, problem: QpProblem, point: KktPoint, status: Status,
               **extra) -> SolveResult:
        return SolveResult(
            point=point,
            status=status,
            solves=self.solves,
            avg_subsystem_size=self.size_total / self.solves if self.solves else 0.0,
            trace=tuple(self.trace),
            objective=objective(problem, point.x),
            inactive_sets=tuple(self.sets) if self.sets is not None else None,
            **extra,
        )


def _zero_point(n: int) -> KktPoint:
    return KktPoint(x=np.zeros(n), s=np.zeros(n))


def _solve_and_classify(problem, I, A, tol, rec):
    sol = solve_subsystem(problem, I, A)
    point = embed_point(problem.n, I, A, sol)
    partition = classify(point, I, A, tol)
    rec.note(partition)
    return point, partition


def generic_ras_solve(problem: QpProblem, cfg: GenericRasConfig) -> SolveResult:
    """Randomized active-set iteration with sigma-bounded exchange probabilities.

    Each round solves the subsystem for the current partition, stops when
    nothing is infeasible, and otherwise exchanges a random subset of the
    infeasible indexes.  An unlucky empty exchange simply re-solves the same
    subsystem (and is counted).  Terminates with probability 1; ``max_solves``
    turns astronomically unlucky runs into ``IterationCapReached``.
    """
    n = problem.n
    rng = np.random.default_rng(cfg.seed)
    I, A = _initial_sets(n, cfg.initial_A)
    rec = _RunRecorder(cfg.record_sets)
    point = _zero_point(n)
    while True:
        try:
            point, part = _solve_and_classify(problem, I, A, cfg.tol, rec)
        except FactorizationError:
            return rec.result(problem, point, Status.NUMERICAL_FAILURE)
        if part.optimal:
            return rec.result(problem, point, Status.OPTIMAL)
        if rec.solves >= cfg.max_solves:
            return rec.result(problem, point, Status.ITERATION_CAP)
        if cfg.probability_rule is None:
            p_Im, p_Am = 0.5, 0.5
        else:
            p_Im, p_Am = cfg.probability_rule(part)
        Imc, Imf, Amc, Amf = select_exchange_generic(part, p_Im, p_Am, cfg.sigma, rng)
        I, A = next_sets(part, Imc, Imf, Amc, Amf)


def ras_solve(problem: QpProblem, cfg: RasConfig) -> SolveResult:
    """Randomized active-set iteration with per-origin exchange probabilities.

    Every currently infeasible index falls into one of six categories
    according to where it sat in the previous iteration (see
    :func:`rasqp.engine.categorize`), and is exchanged with that category's
    probability.  When a draw selects nothing, no subsystem is re-solved:
    the kept infeasible indexes are reclassified as "previously frozen"
    (Imf/Amf), the feasible snapshots Ip0/Ap0 are refreshed, and the draw is
    repeated — capped at 10*n redraws before giving up with
    ``IterationCapReached``.
    """
    n = problem.n
    rng = np.random.default_rng(cfg.seed)
    I, A = _initial_sets(n, cfg.initial_A)
    history = History.initial(n)
    rec = _RunRecorder(cfg.record_sets)
    point = _zero_point(n)
    empty = np.empty(0, dtype=np.int64)
    while True:
        try:
            point, part = _solve_and_classify(problem, I, A, cfg.tol, rec)
        except FactorizationError:
            return rec.result(problem, point, Status.NUMERICAL_FAILURE)
        if part.optimal:
            return rec.result(problem, point, Status.OPTIMAL)
        if rec.solves >= cfg.max_solves:
            return rec.result(problem, point, Status.ITERATION_CAP)
        resamples = 0
        while True:
            cats = categorize(part, history)
            Imc, Imf, Amc, Amf = select_exchange_ras(cats, cfg.probs, rng)
            if len(Imc) or len(Amc):
                break
            history = History(Ip0=part.Ip, Ap0=part.Ap, Imc=empty, Amc=empty,
                              Imf=part.Im, Amf=part.Am)
            resamples += 1
            if resamples > 10 * n:
                return rec.result(problem, point, Status.ITERATION_CAP)
        I, A = next_sets(part, Imc, Imf, Amc, Amf)
        history = History(Ip0=part.Ip, Ap0=part.Ap, Imc=Imc, Amc=Amc,
                          Imf=Imf, Amf=Amf)


def kr_solve(problem: QpProblem, cfg: KrConfig) -> SolveResult:
    """Deterministic full-exchange iteration: I <- Ip u Am every step.

    Stops with ``Optimal`` when nothing is infeasible and with
    ``CycleDetected`` either when the iteration cap is reached or as soon as
    an active set repeats (detected via a set of visited A's, which yields
    the same fail verdict as running out the cap, only sooner).
    """
    n = problem.n
    I, A = _initial_sets(n, cfg.initial_A)
    rec = _RunRecorder(cfg.record_sets)
    point = _zero_point(n)
    visited = {A.tobytes()}
    while True:
        try:
            point, part = _solve_and_classify(problem, I, A, cfg.tol, rec)
        except FactorizationError:
            return rec.result(problem, point, Status.NUMERICAL_FAILURE)
        if part.optimal:
            return rec.result(problem, point, Status.OPTIMAL)
        if rec.solves >= cfg.max_iterations:
            return rec.result(problem, point, Status.CYCLE_DETECTED)
        I, A = next_sets(part, part.Im, np.empty(0, dtype=np.int64),
                         part.Am, np.empty(0, dtype=np.int64))
        key = A.tobytes()
        if key in visited:
            return rec.result(problem, point, Status.CYCLE_DETECTED)
        visited.add(key)


def fletcher_solve(
    problem: QpProblem,
    tol: float = 1e-10,
    initial_A=None,
    *,
    record_iterates: bool = False,
) -> SolveResult:
    """Primal-feasible active-set method changing one index at a time.

    Inner loop: solve for the target x_I* = -Q[I,I]^{-1} g[I]; if the target
    is nonnegative, accept it, otherwise step from the current (feasible) x_I
    toward the target until the first coordinate hits zero — the blocking
    index, the one with the smallest ratio x_i / (x_i - x_i*) among targets
    x_i* < 0, ties broken by smallest index — move it to A (pinning it at
    exactly 0, with any round-off negatives clamped), and repeat.  Outer
    loop: with x_I accepted, check s_A; if min s_A >= -tol the point is
    optimal, otherwise release the most negative index (ties by smallest
    index) into I.

    Every iterate is exactly nonnegative and the objective never increases;
    the run terminates finitely.  ``objective_history`` records the objective
    at the start and after each outer acceptance; ``record_iterates``
    additionally stores every iterate x.  The 10*n^2 solve cap is purely
    defensive.
    """
    n = problem.n
    I, A = _initial_sets(n, initial_A)
    x = np.zeros(n)
    rec = _RunRecorder(record_sets=False)
    cap = 10 * n * n
    obj_hist = [objective(problem, x)]
    iter_hist = [x.copy()] if record_iterates else None
    status = None
    sol = None
    while status is None:
        # Inner loop: reach the subsystem target on the current I.
        while True:
            try:
                sol = solve_subsystem(problem, I, A)
            except FactorizationError:
                status = Status.NUMERICAL_FAILURE
                break
            rec.solves += 1
            rec.size_total += sol.subsystem_size
            n_im = int((sol.x_I < 0.0).sum())
            n_am = int((sol.s_A < -tol).sum())
            rec.trace.append(TraceRow(rec.solves, n_im, n_am, sol.subsystem_size,
                                      time.perf_counter() - rec.t0))
            if rec.solves > cap:
                status = Status.ITERATION_CAP
                break
            if n_im == 0:
                x[I] = sol.x_I
                break
            current = x[I]
            target = sol.x_I
            neg = target < 0.0
            ratios = current[neg] / (current[neg] - target[neg])
            k = int(np.argmin(ratios))  # first minimum = smallest blocking index
            blocked = I[neg][k]
            x[I] = np.maximum(current + ratios[k] * (target - current), 0.0)
            x[blocked] = 0.0
            I = I[I != blocked]
            A = np.sort(np.append(A, blocked))
            if record_iterates:
                iter_hist.append(x.copy())
        if status is not None:
            break
        if record_iterates:
            iter_hist.append(x.copy())
        obj_hist.append(objective(problem, x))
        if len(A) == 0 or sol.s_A.min() >= -tol:
            status = Status.OPTIMAL
            break
        released = A[int(np.argmin(sol.s_A))]  # most negative, ties by index
        I = np.sort(np.append(I, released))
        A = A[A != released]

    s = np.zeros(n)
    if sol is not None and len(sol.s_A) == len(A):
        s[A] = sol.s_A
    return rec.result(
        problem,
        KktPoint(x=x, s=s),
        status,
        objective_history=tuple(obj_hist),
        iterate_history=tuple(iter_hist) if iter_hist is not None else None,
    )


def brute_force_solve(problem: QpProblem, tol: float = 1e-10) -> KktPoint:
    """Enumerate all 2^n inactive sets and return the best KKT point.

    A partition qualifies when x_I >= 0 (zeros allowed) and s_A >= -tol; the
    qualifying point with the lowest objective is returned.  Subsystems are
    solved by LU with partial pivoting (``np.linalg.solve``) — deliberately a
    different code path from the Cholesky kernel the solvers use, so the two
    routes cross-check each other.  Enforces n <= 20.
    """
    n = problem.n
    if n > 20:
        raise DimensionTooLargeError(f"n = {n} exceeds the brute-force limit of 20")
    Q = problem.dense_q()
    g = problem.g
    all_ix = np.arange(n, dtype=np.int64)
    best = None
    best_obj = np.inf
    for mask in range(1 << n):
        I = all_ix[[(mask >> i) & 1 == 1 for i in range(n)]]
        A = all_ix[[(mask >> i) & 1 == 0 for i in range(n)]]
        if len(I):
            x_I = np.linalg.solve(Q[np.ix_(I, I)], -g[I])
            if x_I.min() < 0.0:
                continue
        else:
            x_I = np.empty(0)
        s_A = Q[np.ix_(A, I)] @ x_I + g[A] if len(A) else np.empty(0)
        if len(s_A) and s_A.min() < -tol:
            continue
        x = np.zeros(n)
        x[I] = x_I
        obj = objective(problem, x)
        if obj < best_obj:
            s = np.zeros(n)
            s[A] = s_A
            best = KktPoint(x=x, s=s)
            best_obj = obj
    if best is None:
        raise NoKktPointError("no partition satisfied the KKT conditions")
    return best
