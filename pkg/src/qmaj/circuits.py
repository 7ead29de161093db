"""
Circuit families: phase-estimation register preparation, the canonical
QFT decomposition (no terminal swap layer), and the two-dimensional Grover
kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distmaj import as_distribution
from .errors import DomainError
from .statevec import (
    Circuit,
    ControlledPhase,
    Hadamard,
    Permutation,
    PhaseKick,
    StateVector,
    run_circuit,
    new_basis_state,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Phase:
    """Eigenphase as a fraction of a full turn, ``0 <= value < 1``.

    When ``k`` and ``m`` are set the phase is exactly ``k / 2**m`` (with
    ``k`` odd or zero), and fractional turns are computed in integers.
    """

    value: float
    k: int | None = None
    m: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.value < 1.0) or not math.isfinite(self.value):
            raise DomainError(f"phase {self.value!r} outside [0, 1)")
        if (self.k is None) != (self.m is None):
            raise DomainError("exact form needs both k and m")
        if self.k is not None:
            if self.m < 0 or not 0 <= self.k < 1 << self.m:
                raise DomainError(f"exact phase {self.k}/2^{self.m} outside [0, 1)")
            if abs(self.value - self.k / 2 ** self.m) > 1e-15:
                raise DomainError("value does not match its exact form")

    @classmethod
    def dyadic(cls, k: int, m: int) -> "Phase":
        if not 0 <= k < 1 << m:
            raise DomainError(f"exact phase {k}/2^{m} outside [0, 1)")
        while k and k % 2 == 0:
            k //= 2
            m -= 1
        if k == 0:
            m = 0
        return cls(k / 2 ** m, k, m)

    @classmethod
    def parse(cls, text: str) -> "Phase":
        """Accepts ``"0.3"`` or ``"5/8"``; any value with a power-of-two denominator is kept exact."""
        text = text.strip()
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse phase {text!r}") from exc
        if not 0 <= frac < 1:
            raise DomainError(f"phase {text!r} outside [0, 1)")
        den = frac.denominator
        if den & (den - 1) == 0:
            return cls.dyadic(frac.numerator, den.bit_length() - 1)
        return cls(float(frac))

    @classmethod
    def coerce(cls, phi) -> "Phase":
        if isinstance(phi, Phase):
            return phi
        if isinstance(phi, str):
            return cls.parse(phi)
        return cls(float(phi))

    @property
    def is_exact(self) -> bool:
        return self.k is not None

    def turns(self, multiplier) -> np.ndarray:
        """Fractional part of ``multiplier * phase``, elementwise."""
        mult = np.asarray(multiplier, dtype=np.int64)
        if self.is_exact:
            return (mult * self.k % (1 << self.m)) / float(1 << self.m)
        return np.mod(mult * self.value, 1.0)

    def literal(self) -> str:
        return f"{self.k}/{1 << self.m}" if self.is_exact else repr(self.value)


def pea_preparation(n: int, phi) -> Circuit:
    """Hadamards on every register qubit, then the kicked-back phase on each."""
    phi = Phase.coerce(phi)
    gates: list = [Hadamard(j) for j in range(n)]
    for j in range(n):
        angle = -TWO_PI * float(phi.turns(1 << j))
        gates.append(PhaseKick(j, angle))
    return Circuit(n, gates)


def build_pea_register_state(n: int, phi, via: str = "formula") -> StateVector:
    """Register state ``2^{-n/2} sum_x e^{-2 pi i x phi} |x>`` after steps (i)-(iii).

    ``via="gates"`` builds it from ``|0...0>`` with Hadamards and phase kicks.
    """
    if n < 1:
        raise DomainError("need at least one qubit")
    phi = Phase.coerce(phi)
    if via == "gates":
        return run_circuit(pea_preparation(n, phi), new_basis_state(n, 0))
    if via != "formula":
        raise DomainError(f"unknown construction {via!r}")
    x = np.arange(1 << n)
    return StateVector(np.full(1 << n, 2.0 ** (-n / 2)), -TWO_PI * phi.turns(x))


def qft_canonical(n: int) -> Circuit:
    if n < 1:
        raise DomainError("need at least one qubit")
    gates: list = []
    for i in range(n - 1, -1, -1):
        gates.append(Hadamard(i))
        for j in range(2, i + 2):
            gates.append(ControlledPhase(i - j + 1, i, TWO_PI / 2 ** j))
    return Circuit(n, gates)


def bit_reverse_indices(n: int) -> np.ndarray:
    x = np.arange(1 << n)
    out = np.zeros_like(x)
    for b in range(n):
        out |= ((x >> b) & 1) << (n - 1 - b)
    return out


def bit_reversal(n: int) -> Permutation:
    return Permutation(bit_reverse_indices(n), name="bit_reversal")


def qft_double(n: int) -> Circuit:
    """Two canonical QFTs with the bit-reversal the circuit omits placed between them.

    With the reversal the pair composes to ``QFT^2`` up to a final
    relabelling of outputs, so the second pass retraces the first.
    """
    q = qft_canonical(n)
    return q + Circuit(n, [bit_reversal(n)]) + q


def final_probabilities_closed_form(n: int, phi) -> np.ndarray:
    """``p_y = |2^{-n} sum_x e^{-2 pi i x (phi - y/2^n)}|^2`` via the geometric sum."""
    if n < 1:
        raise DomainError("need at least one qubit")
    phi = Phase.coerce(phi)
    big_n = 1 << n
    y = np.arange(big_n)
    if phi.is_exact and phi.m <= n:
        hit = phi.k << (n - phi.m)
        p = np.zeros(big_n)
        p[hit] = 1.0
        return p
    # numerator sin(pi N delta), N delta = N phi - y; denominator N sin(pi delta)
    n_delta = big_n * phi.value - y
    delta = phi.value - y / big_n
    p = np.ones(big_n)
    nz = delta != 0
    p[nz] = (np.sin(math.pi * n_delta[nz]) / (big_n * np.sin(math.pi * delta[nz]))) ** 2
    return as_distribution(p)


# -- Grover ----------------------------------------------------------------

@dataclass(frozen=True)
class GroverState:
    a_perp: float
    a_m: float

    def __post_init__(self):
        if abs(self.a_perp ** 2 + self.a_m ** 2 - 1.0) > 1e-12:
            raise DomainError("Grover state is not normalized")

    def as_vector(self) -> np.ndarray:
        return np.array([self.a_perp, self.a_m])

    @property
    def p_marked(self) -> float:
        return self.a_m ** 2


@dataclass(frozen=True)
class GroverKernel:
    """Descriptor for one kernel application in a traced Grover run."""

    theta: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return ()

    def describe(self) -> dict:
        return {"kind": "grover_kernel", "qubits": [], "angle": float(self.theta)}


def grover_angle(n: int) -> float:
    if n < 1:
        raise DomainError("need at least one qubit")
    return math.acos(1.0 - 2.0 / 2 ** n)


def grover_kernel(n: int) -> np.ndarray:
    """Rotation by ``theta = arccos(1 - 2/2^n)`` on ``(a_perp, a_m)``."""
    t = grover_angle(n)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def grover_initial(n: int) -> GroverState:
    if n < 1:
        raise DomainError("need at least one qubit")
    return GroverState(math.sqrt(1.0 - 2.0 ** -n), 2.0 ** (-n / 2))


def grover_trajectory(n: int, iterations: int) -> list[GroverState]:
    if iterations < 0:
        raise DomainError("iterations must be >= 0")
    k = grover_kernel(n)
    s = grover_initial(n)
    out = [s]
    v = s.as_vector()
    for _ in range(iterations):
        v = k @ v
        out.append(GroverState(float(v[0]), float(v[1])))
    return out


def expand_grover(state: GroverState, n: int, marked: int = 0) -> np.ndarray:
    big_n = 1 << n
    if not 0 <= marked < big_n:
        raise DomainError(f"marked index {marked} out of range")
    p = np.full(big_n, state.a_perp ** 2 / (big_n - 1))
    p[marked] = state.a_m ** 2
    return p


def run_grover(n: int, iterations: int, marked: int = 0) -> list[np.ndarray]:
    return [expand_grover(s, n, marked) for s in grover_trajectory(n, iterations)]
