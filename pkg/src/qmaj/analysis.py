"""
H(i)-pair structure and interference residuals.

An H(i)-pair is the two basis states that differ only in qubit ``i``; a
Hadamard on ``i`` mixes exactly those two amplitudes.  When the pair's
amplitudes differ only by a phase, the Hadamard step sorts the
distribution (the post-gate distribution majorizes the pre-gate one).

"Natural" majorization: writing the pre-gate probabilities through the
inverse evolution, ``|a_i|^2 = sum_j |u_ij|^2 |a'_j|^2 + residual_i`` with
``u = U^dag``.  When every residual vanishes the pre-gate distribution is
``D`` times the post-gate one with ``D_ij = |u_ij|^2`` doubly stochastic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .distmaj import MajorizationVerdict, StochasticCheck, compare, is_doubly_stochastic
from .errors import DomainError
from .statevec import (
    Generic,
    StateVector,
    apply_generic,
    apply_hadamard,
    gate_matrix,
    Hadamard,
    probabilities,
)

STRUCT_TOL = 1e-12
PHASE_FLOOR = 1e-13


def hpair_pairing(n: int, i: int) -> list[tuple[int, int]]:
    if not 0 <= i < n:
        raise DomainError(f"qubit index {i} out of range for {n} qubits")
    return [(x, x + (1 << i)) for x in range(1 << n) if not (x >> i) & 1]


def _pair_indices(n: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.arange(1 << n)
    lo = x[((x >> i) & 1) == 0]
    return lo, lo + (1 << i)


@dataclass(frozen=True, eq=False)
class HPairReport:
    qubit: int
    pair_count: int
    max_modulus_deviation: float
    phase_list: np.ndarray  # relative phase per pair, NaN where a modulus is below PHASE_FLOOR
    holds: bool
    tol: float = STRUCT_TOL


def hpair_report(s: StateVector, i: int, tol: float = STRUCT_TOL) -> HPairReport:
    n = s.n_qubits
    if not 0 <= i < n:
        raise DomainError(f"qubit index {i} out of range for {n} qubits")
    lo, hi = _pair_indices(n, i)
    m0, m1 = s.moduli[lo], s.moduli[hi]
    dev = float(np.max(np.abs(m0 - m1)))
    defined = (m0 > PHASE_FLOOR) & (m1 > PHASE_FLOOR)
    delta = np.angle(np.exp(1j * (s.phases[hi] - s.phases[lo])))
    phases = np.where(defined, delta, np.nan)
    return HPairReport(i, lo.size, dev, phases, dev < tol, tol)


def hpair_propagation_check(
    s: StateVector, applied: int, remaining: Iterable[int], tol: float = STRUCT_TOL
) -> dict[int, HPairReport]:
    """Apply a Hadamard on ``applied`` and report the H(j)-pairs for each ``j`` in ``remaining``."""
    remaining = sorted(set(remaining))
    if applied in remaining:
        raise DomainError("the applied qubit cannot be among the remaining ones")
    after = apply_hadamard(s, applied)
    return {j: hpair_report(after, j, tol) for j in remaining}


def pair_interference_vanishes(c0: complex, c1: complex, tol: float = STRUCT_TOL) -> bool:
    """The cross term ``Re((c0+c1)^*(c0-c1)) = |c0|^2 - |c1|^2`` is zero iff the moduli agree."""
    return bool(abs(abs(c0) - abs(c1)) < tol)


@dataclass(frozen=True, eq=False)
class NaturalMajorizationReport:
    residuals: np.ndarray
    max_residual: float
    D: object  # dense ndarray or scipy sparse array
    natural: bool
    verdict_if_natural: MajorizationVerdict | None
    stochastic: StochasticCheck


def _report(p_before, p_after, d, tol) -> NaturalMajorizationReport:
    residuals = p_before - d @ p_after
    max_res = float(np.max(np.abs(residuals)))
    natural = max_res < tol
    verdict = compare(p_before, p_after) if natural else None
    return NaturalMajorizationReport(residuals, max_res, d, natural, verdict, is_doubly_stochastic(d))


def interference_residuals(u, initial: StateVector, tol: float = STRUCT_TOL) -> NaturalMajorizationReport:
    g = u if isinstance(u, Generic) else Generic(np.asarray(u))
    if g.matrix.shape[0] != initial.dim:
        raise DomainError(f"unitary of dimension {g.matrix.shape[0]} on a state of dimension {initial.dim}")
    final = apply_generic(initial, g)
    d = np.abs(g.matrix.conj().T) ** 2
    return _report(probabilities(initial), probabilities(final), d, tol)


def hadamard_doubly_stochastic(n: int, i: int) -> sp.csr_array:
    """``|H_i^dag|^2``: a 1/2 block on every H(i)-pair, as a sparse matrix."""
    lo, hi = _pair_indices(n, i)
    rows = np.concatenate([lo, lo, hi, hi])
    cols = np.concatenate([lo, hi, lo, hi])
    data = np.full(rows.size, 0.5)
    return sp.csr_array((data, (rows, cols)), shape=(1 << n, 1 << n))


def hadamard_interference(
    s: StateVector,
    i: int,
    tol: float = STRUCT_TOL,
    after: StateVector | None = None,
    dense_max_qubits: int = 6,
) -> NaturalMajorizationReport:
    """Natural-majorization report for a Hadamard on qubit ``i``.

    Up to ``dense_max_qubits`` the full 2^n matrix is materialized and
    routed through :func:`interference_residuals`; above that the 2x2
    block structure is used directly.
    """
    if s.n_qubits <= dense_max_qubits:
        return interference_residuals(gate_matrix(Hadamard(i), s.n_qubits), s, tol)
    if after is None:
        after = apply_hadamard(s, i)
    d = hadamard_doubly_stochastic(s.n_qubits, i)
    return _report(probabilities(s), probabilities(after), d, tol)
