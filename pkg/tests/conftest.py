"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from rasqp import QpProblem, Status, kkt_residual


def rand_spd_problem(n: int, rng: np.random.Generator) -> QpProblem:
    """A dense, comfortably conditioned SPD instance: Q = AA' + I."""
    A = rng.standard_normal((n, n))
    return QpProblem(A @ A.T + np.eye(n), rng.standard_normal(n))


def assert_certificate(problem: QpProblem, result, tol: float) -> None:
    """The optimality certificate every Optimal result must carry.

    Stationarity is scale-relative (1e-6 * (1 + ||g||_inf)); x must be
    nonnegative exactly, s may dip to -tol, and complementarity must be a
    structural (exact) zero.
    """
    assert result.status is Status.OPTIMAL
    stationarity, primal_viol, dual_viol, comp_viol = kkt_residual(problem, result.point)
    assert stationarity <= 1e-6 * (1.0 + float(np.abs(problem.g).max()))
    assert primal_viol == 0.0
    assert dual_viol <= tol
    assert comp_viol == 0.0
