"""Active-set bookkeeping and randomized exchange selection.

After each subsystem solve the indexes split into feasible and infeasible
parts:

    Im = {i in I : x_i <= 0}    Ip = I \\ Im
    Am = {j in A : s_j < -tol}  Ap = A \\ Am

(a zero-valued inactive variable counts as infeasible; an active variable
with s_j exactly at -tol counts as feasible).  A randomized method then picks
a subset of Im u Am to exchange between I and A.  The refined selection rule
tracked here remembers, for every currently infeasible index, which of the
previous iteration's six sets it came from, and applies one exchange
probability per origin category.

All index sets are sorted int64 arrays.  Random draws are consumed in a
fixed, documented order (one uniform per element; Im-side categories before
Am-side, each in ascending index order), which makes every seeded run
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import KktPoint

__all__ = [
    "Partition",
    "History",
    "Categories",
    "ChangeProbabilities",
    "CategoryLeakError",
    "classify",
    "categorize",
    "rand_subset",
    "select_exchange_generic",
    "select_exchange_ras",
    "next_sets",
    "exchange_asymmetry_montecarlo",
]

_EMPTY = np.empty(0, dtype=np.int64)


def _as_index_array(ix) -> np.ndarray:
    a = np.asarray(ix, dtype=np.int64)
    return a if a.ndim == 1 else a.reshape(-1)


class CategoryLeakError(RuntimeError):
    """The six origin categories failed to partition Im u Am (bookkeeping bug)."""


@dataclass(frozen=True)
class Partition:
    """Current split of {0..n-1} into I/A and their feasible/infeasible parts."""

    I: np.ndarray
    A: np.ndarray
    Im: np.ndarray
    Ip: np.ndarray
    Am: np.ndarray
    Ap: np.ndarray

    @property
    def n(self) -> int:
        return len(self.I) + len(self.A)

    @property
    def optimal(self) -> bool:
        """True when no index is infeasible, i.e. the partition is optimal."""
        return len(self.Im) == 0 and len(self.Am) == 0


@dataclass(frozen=True)
class History:
    """The previous iteration's six sets.

    Invariant (after any real step): previous I = Ip0 u Imf u Amc and
    previous A = Ap0 u Amf u Imc.  At initialization Imf = Amf = {0..n-1} and
    the other four are empty, which makes the first iteration treat every
    infeasible index as "previously frozen".
    """

    Ip0: np.ndarray
    Ap0: np.ndarray
    Imc: np.ndarray
    Amc: np.ndarray
    Imf: np.ndarray
    Amf: np.ndarray

    @staticmethod
    def initial(n: int) -> "History":
        full = np.arange(n, dtype=np.int64)
        return History(_EMPTY, _EMPTY, _EMPTY, _EMPTY, full, full.copy())


@dataclass(frozen=True)
class Categories:
    """Currently infeasible indexes, classified by their previous location.

    Im splits into NImp0 (were feasible inactive), NImf (were infeasible
    inactive but kept), NImc (were just moved in from A); Am splits into
    NAmp0 / NAmf / NAmc symmetrically, NAmc being indexes just moved out
    of I.
    """

    NImp0: np.ndarray
    NImf: np.ndarray
    NImc: np.ndarray
    NAmp0: np.ndarray
    NAmf: np.ndarray
    NAmc: np.ndarray


@dataclass(frozen=True)
class ChangeProbabilities:
    """Per-category exchange probabilities p1..p6.

    Convergence arguments need every p_i strictly inside (0, 1); p_i = 1 is
    additionally allowed as the degenerate certainty setting under which the
    selection reduces to the full exchange (useful for tests and for
    emulating the full-exchange method).  Defaults are the tuned values.
    """

    p1: float = 0.5
    p2: float = 0.98
    p3: float = 0.98
    p4: float = 0.01
    p5: float = 0.93
    p6: float = 0.94

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4", "p5", "p6"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} = {v!r} outside (0, 1]")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.p1, self.p2, self.p3, self.p4, self.p5, self.p6)


def classify(point: KktPoint, I, A, tol: float) -> Partition:
    """Split I by the sign of x (x_i <= 0 infeasible) and A by s_j < -tol."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    I = _as_index_array(I)
    A = _as_index_array(A)
    x_I = point.x[I]
    s_A = point.s[A]
    im_mask = x_I <= 0.0
    am_mask = s_A < -tol
    return Partition(
        I=I,
        A=A,
        Im=I[im_mask],
        Ip=I[~im_mask],
        Am=A[am_mask],
        Ap=A[~am_mask],
    )


def categorize(partition: Partition, history: History) -> Categories:
    """Intersect Im and Am with the previous iteration's sets.

    Because the previous I was Ip0 u Imf u Amc (disjoint), the three
    Im-side intersections partition Im, and symmetrically for Am.  A failure
    of that accounting raises :class:`CategoryLeakError`.
    """
    cats = Categories(
        NImp0=np.intersect1d(partition.Im, history.Ip0),
        NImf=np.intersect1d(partition.Im, history.Imf),
        NImc=np.intersect1d(partition.Im, history.Amc),
        NAmp0=np.intersect1d(partition.Am, history.Ap0),
        NAmf=np.intersect1d(partition.Am, history.Amf),
        NAmc=np.intersect1d(partition.Am, history.Imc),
    )
    if len(cats.NImp0) + len(cats.NImf) + len(cats.NImc) != len(partition.Im):
        raise CategoryLeakError("Im not covered by {Ip0, Imf, Amc}")
    if len(cats.NAmp0) + len(cats.NAmf) + len(cats.NAmc) != len(partition.Am):
        raise CategoryLeakError("Am not covered by {Ap0, Amf, Imc}")
    return cats


def rand_subset(indexes, probs, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli thinning of an index set.

    ``probs`` is a scalar or a vector of per-element inclusion probabilities
    in [0, 1].  Consumes exactly ``len(indexes)`` uniform draws, one per
    element in array order, so the stream position after the call is
    independent of the outcome.
    """
    indexes = _as_index_array(indexes)
    p = np.broadcast_to(np.asarray(probs, dtype=np.float64), indexes.shape)
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    if len(indexes) == 0:
        return _EMPTY
    return indexes[rng.random(len(indexes)) < p]


def select_exchange_generic(partition: Partition, p_Im, p_Am, sigma: float, rng):
    """One-shot random exchange selection with probabilities in [sigma, 1-sigma].

    Returns (Imc, Imf, Amc, Amf) where Imc/Imf partition Im and Amc/Amf
    partition Am.  Draws are consumed for Im first, then Am.
    """
    if not 0.0 < sigma <= 0.5:
        raise ValueError("sigma must lie in (0, 0.5]")
    for p, m in ((p_Im, partition.Im), (p_Am, partition.Am)):
        arr = np.broadcast_to(np.asarray(p, dtype=np.float64), m.shape)
        if arr.size and (arr.min() < sigma - 1e-15 or arr.max() > 1.0 - sigma + 1e-15):
            raise ValueError(f"probabilities must lie in [{sigma}, {1.0 - sigma}]")
    Imc = rand_subset(partition.Im, p_Im, rng)
    Amc = rand_subset(partition.Am, p_Am, rng)
    return Imc, np.setdiff1d(partition.Im, Imc), Amc, np.setdiff1d(partition.Am, Amc)


def select_exchange_ras(cats: Categories, probs: ChangeProbabilities, rng):
    """Category-wise random exchange selection.

    Each origin category is thinned with its own probability; the union of
    the Im-side picks is Imc and of the Am-side picks is Amc.  Draw order is
    NImp0, NImf, NImc, then NAmp0, NAmf, NAmc (each ascending).
    """
    imc = [
        rand_subset(cats.NImp0, probs.p1, rng),
        rand_subset(cats.NImf, probs.p2, rng),
        rand_subset(cats.NImc, probs.p3, rng),
    ]
    amc = [
        rand_subset(cats.NAmp0, probs.p4, rng),
        rand_subset(cats.NAmf, probs.p5, rng),
        rand_subset(cats.NAmc, probs.p6, rng),
    ]
    Imc = np.union1d(np.union1d(imc[0], imc[1]), imc[2]).astype(np.int64)
    Amc = np.union1d(np.union1d(amc[0], amc[1]), amc[2]).astype(np.int64)
    Im = np.union1d(np.union1d(cats.NImp0, cats.NImf), cats.NImc).astype(np.int64)
    Am = np.union1d(np.union1d(cats.NAmp0, cats.NAmf), cats.NAmc).astype(np.int64)
    return Imc, np.setdiff1d(Im, Imc), Amc, np.setdiff1d(Am, Amc)


def next_sets(partition: Partition, Imc, Imf, Amc, Amf):
    """Apply an exchange: I_new = Ip u Imf u Amc, A_new its complement.

    (Equivalently A_new = Ap u Amf u Imc.)  Inputs must partition Im and Am.
    """
    Imc, Imf, Amc, Amf = map(_as_index_array, (Imc, Imf, Amc, Amf))
    if len(Imc) + len(Imf) != len(partition.Im) or len(Amc) + len(Amf) != len(partition.Am):
        raise ValueError("(Imc, Imf) and (Amc, Amf) must partition Im and Am")
    I_new = np.union1d(np.union1d(partition.Ip, Imf), Amc).astype(np.int64)
    A_new = np.setdiff1d(
        np.arange(partition.n, dtype=np.int64), I_new, assume_unique=True
    )
    return I_new, A_new


def exchange_asymmetry_montecarlo(samples: int, rng: np.random.Generator, *,
                                  diagonal_only: bool = False):
    """Monte Carlo comparison of the two canonical full-exchange transitions.

    Draws random 2x2 problems — entries of Q standard normal,
    rejection-sampled until Q is positive definite (so the off-diagonal
    Q12 stays mean-zero symmetric), g standard bivariate normal — and
    examines, at tol = 0, the two extreme one-step transitions:

    * shrink case: both variables inactive and both infeasible
      (x = -Q^{-1}g <= 0), everything is exchanged out, and the count N1 of
      infeasible indexes at the next iterate (#{i : g_i < 0}) is recorded.
      N1 can only be nonzero when Q12 < 0, so the mean is taken over
      qualifying samples with Q12 < 0.
    * grow case: both variables active and both infeasible (g < 0),
      everything is exchanged in, and N2 = #{i : x_i <= 0} at the next
      iterate is recorded over qualifying samples with Q12 > 0, the branch
      where N2 can be nonzero.

    Returns ``(e_n1, e_n2, stderr)``: the two conditional empirical means
    and a standard error for their difference.  An empty conditioning set
    yields a mean of 0.0; with fewer than two qualifying samples on either
    side the standard error is +inf.  E(N1) < E(N2) strictly unless Q12 is
    identically zero (``diagonal_only=True`` forces Q12 = 0, making both
    means exactly 0).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sum1 = sum2 = sq1 = sq2 = 0.0
    m1 = m2 = 0
    remaining = samples
    while remaining > 0:
        take = min(remaining, 2_000_000)
        q11, q22, q12 = _draw_pd_entries(take, rng, diagonal_only)
        g = rng.standard_normal((take, 2))
        g1, g2 = g[:, 0], g[:, 1]
        det = q11 * q22 - q12 * q12
        x1 = (-q22 * g1 + q12 * g2) / det
        x2 = (q12 * g1 - q11 * g2) / det

        shrink = (x1 <= 0.0) & (x2 <= 0.0) & (q12 < 0.0)
        n1 = (g1[shrink] < 0.0).astype(np.float64) + (g2[shrink] < 0.0)
        grow = (g1 < 0.0) & (g2 < 0.0) & (q12 > 0.0)
        n2 = (x1[grow] <= 0.0).astype(np.float64) + (x2[grow] <= 0.0)

        sum1 += n1.sum()
        sq1 += (n1 * n1).sum()
        m1 += n1.size
        sum2 += n2.sum()
        sq2 += (n2 * n2).sum()
        m2 += n2.size
        remaining -= take

    e1 = sum1 / m1 if m1 else 0.0
    e2 = sum2 / m2 if m2 else 0.0
    if m1 < 2 or m2 < 2:
        return e1, e2, math.inf
    var1 = max(0.0, sq1 / m1 - e1 * e1)
    var2 = max(0.0, sq2 / m2 - e2 * e2)
    return e1, e2, math.sqrt(var1 / m1 + var2 / m2)


def _draw_pd_entries(count: int, rng: np.random.Generator, diagonal_only: bool):
    """Rejection-sample `count` (Q11, Q22, Q12) triples with Q PD."""
    out = [np.empty(0) for _ in range(3)]
    have = 0
    while have < count:
        # PD acceptance for a 2x2 symmetric Gaussian draw is ~1/8, so
        # oversample accordingly.
        batch = max(4096, int((count - have) * 9))
        a = rng.standard_normal(batch)
        b = rng.standard_normal(batch)
        c = np.zeros(batch) if diagonal_only else rng.standard_normal(batch)
        ok = (a > 0.0) & (b > 0.0) & (a * b - c * c > 0.0)
        out = [np.concatenate([o, v[ok]]) for o, v in zip(out, (a, b, c))]
        have = out[0].size
    return out[0][:count], out[1][:count], out[2][:count]
