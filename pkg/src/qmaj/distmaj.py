"""
Majorization of finite probability distributions.

``y`` majorizes ``x`` (``x < y``) when every top-k partial sum of ``x``
sorted in decreasing order is at most the matching partial sum of ``y``.
Equivalent forms are ``x = D y`` for a doubly stochastic ``D`` and
``x = sum_j p_j P_j y`` for a convex mixture of permutations; this module
checks the partial-sum form directly and provides the other two as
constructive witnesses.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ValidationError

DEFAULT_TOL = 1e-10
CLAMP_TOL = 1e-14


class Relation(str, Enum):
    SECOND_MAJORIZES_FIRST = "SecondMajorizesFirst"
    FIRST_MAJORIZES_SECOND = "FirstMajorizesSecond"
    EQUIVALENT = "Equivalent"
    INCOMPARABLE = "Incomparable"

    def __str__(self) -> str:
        return self.value

    @property
    def reversed(self) -> "Relation":
        swap = {
            Relation.SECOND_MAJORIZES_FIRST: Relation.FIRST_MAJORIZES_SECOND,
            Relation.FIRST_MAJORIZES_SECOND: Relation.SECOND_MAJORIZES_FIRST,
        }
        return swap.get(self, self)


# a step is "monotone" when the later distribution is at least as ordered
NON_DECREASING = frozenset({Relation.SECOND_MAJORIZES_FIRST, Relation.EQUIVALENT})
NON_INCREASING = frozenset({Relation.FIRST_MAJORIZES_SECOND, Relation.EQUIVALENT})


@dataclass(frozen=True, eq=False)
class MajorizationVerdict:
    relation: Relation
    cumsum_first: np.ndarray
    cumsum_second: np.ndarray
    max_violation: float

    @property
    def second_majorizes_first(self) -> bool:
        return self.relation in NON_DECREASING


def as_distribution(values, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate ``values`` as a probability vector; tiny negatives are clamped to 0."""
    x = np.array(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise DomainError("a distribution needs at least one entry")
    if not np.all(np.isfinite(x)):
        raise DomainError("distribution entries must be finite")
    if np.min(x) < -CLAMP_TOL:
        raise DomainError(f"negative probability {np.min(x):.3e}")
    x = np.maximum(x, 0.0)
    total = float(np.sum(x))
    if abs(total - 1.0) > tol:
        raise DomainError(f"probabilities sum to {total!r}, not 1")
    return x


def sorted_cumsum(x) -> np.ndarray:
    return np.cumsum(np.sort(np.asarray(x, dtype=np.float64), kind="stable")[::-1])


def compare(x, y, tol: float = DEFAULT_TOL) -> MajorizationVerdict:
    """Classify ``x`` against ``y`` in the majorization order.

    ``SecondMajorizesFirst`` means ``x < y``.  Each inequality is checked
    one-sidedly at ``tol``.  ``max_violation`` is the largest amount by
    which the reported relation's inequalities are exceeded; for
    ``Incomparable`` it is the smaller of the two directions' excesses.
    """
    x = as_distribution(x)
    y = as_distribution(y)
    if x.size != y.size:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    return compare_cumsums(sorted_cumsum(x), sorted_cumsum(y), tol)


def compare_cumsums(cx: np.ndarray, cy: np.ndarray, tol: float = DEFAULT_TOL) -> MajorizationVerdict:
    """:func:`compare` on precomputed descending cumulative sums."""
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    diff = cx[:-1] - cy[:-1]
    over_xy = float(max(0.0, diff.max())) if diff.size else 0.0     # breaks x < y
    over_yx = float(max(0.0, (-diff).max())) if diff.size else 0.0  # breaks y < x
    y_over_x = over_xy <= tol
    x_over_y = over_yx <= tol
    if y_over_x and x_over_y:
        rel, viol = Relation.EQUIVALENT, max(over_xy, over_yx)
    elif y_over_x:
        rel, viol = Relation.SECOND_MAJORIZES_FIRST, over_xy
    elif x_over_y:
        rel, viol = Relation.FIRST_MAJORIZES_SECOND, over_yx
    else:
        rel, viol = Relation.INCOMPARABLE, min(over_xy, over_yx)
    return MajorizationVerdict(rel, cx, cy, viol)


def lorenz_points(x) -> np.ndarray:
    """``(d+1, 2)`` array of ``(k/d, top-k mass)`` from ``(0, 0)`` to ``(1, 1)``."""
    x = as_distribution(x)
    d = x.size
    pts = np.empty((d + 1, 2))
    pts[:, 0] = np.arange(d + 1) / d
    pts[0, 1] = 0.0
    pts[1:, 1] = sorted_cumsum(x)
    return pts


class StochasticCheck(NamedTuple):
    ok: bool
    max_deviation: float


def is_doubly_stochastic(d, tol: float = DEFAULT_TOL) -> StochasticCheck:
    """Accepts a dense array or a scipy sparse matrix."""
    if sp.issparse(d):
        if d.shape[0] != d.shape[1]:
            raise DomainError(f"matrix is not square: {d.shape}")
        rows = np.asarray(d.sum(axis=1)).ravel()
        cols = np.asarray(d.sum(axis=0)).ravel()
        data = d.tocoo().data
        neg = float(max(0.0, -data.min())) if data.size else 0.0
    else:
        d = np.asarray(d, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DomainError(f"matrix is not square: {d.shape}")
        rows, cols = d.sum(axis=1), d.sum(axis=0)
        neg = float(max(0.0, -d.min()))
    dev = float(max(np.abs(rows - 1).max(), np.abs(cols - 1).max(), neg))
    return StochasticCheck(dev <= tol, dev)


def apply_doubly_stochastic(d, y, tol: float = DEFAULT_TOL) -> np.ndarray:
    y = as_distribution(y)
    if d.shape != (y.size, y.size):
        raise DomainError(f"matrix of shape {d.shape} applied to a length-{y.size} distribution")
    check = is_doubly_stochastic(d, tol)
    if not check.ok:
        raise ValidationError(f"matrix is not doubly stochastic (deviation {check.max_deviation:.3e})")
    return as_distribution(d @ y)


def _check_pairing(pairing: Sequence[tuple[int, int]], d: int) -> np.ndarray:
    p = np.asarray(pairing, dtype=np.int64).reshape(-1, 2)
    flat = np.sort(p.ravel())
    if flat.size != d or not np.array_equal(flat, np.arange(d)):
        raise DomainError("pairing must partition all indices into disjoint pairs")
    return p


def hadamard_mixture_witness(before, after, pairing) -> float:
    """Residual of ``before = (P1 + P2)/2 after`` with ``P1 = I`` and ``P2`` swapping each pair.

    A residual below tolerance is an explicit permutation-mixture witness
    that ``after`` majorizes ``before``.
    """
    before = as_distribution(before)
    after = as_distribution(after)
    if before.size != after.size:
        raise DomainError("length mismatch")
    p = _check_pairing(pairing, after.size)
    swapped = after.copy()
    swapped[p[:, 0]] = after[p[:, 1]]
    swapped[p[:, 1]] = after[p[:, 0]]
    return float(np.max(np.abs(before - 0.5 * (after + swapped))))


def shannon_entropy(x) -> float:
    x = as_distribution(x)
    nz = x[x > 0]
    return float(-np.sum(nz * np.log2(nz)))


def random_doubly_stochastic(d: int, rng: np.random.Generator, terms: int = 4) -> np.ndarray:
    """Convex mixture of ``terms`` random permutation matrices."""
    w = rng.dirichlet(np.ones(terms))
    out = np.zeros((d, d))
    for wk in w:
        out[np.arange(d), rng.permutation(d)] += wk
    return out
