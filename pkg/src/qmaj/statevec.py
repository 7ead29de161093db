"""
Exact n-qubit pure states and the elementary gates used by the QFT and
phase-estimation circuits.

Index convention: qubit j is bit j of the basis index, so
``x = sum_j x_j 2**j`` and qubit 0 is the least significant bit.

States are stored in polar form (moduli, phases).  Diagonal gates
(controlled-phase, phase kick) only touch the phase array, which keeps
every modulus bit-identical across them.  Gates that mix amplitudes
(Hadamard, generic unitaries) go through the complex representation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DomainError, InvariantError, ValidationError

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n_qubits`` qubits, held as moduli and phases."""

    moduli: np.ndarray
    phases: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.moduli, dtype=np.float64)
        p = np.asarray(self.phases, dtype=np.float64)
        if m.ndim != 1 or m.shape != p.shape:
            raise ValidationError("moduli and phases must be 1-D arrays of equal length")
        dim = m.size
        if dim < 2 or dim & (dim - 1):
            raise ValidationError(f"state length {dim} is not 2**n with n >= 1")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(p))):
            raise ValidationError("amplitudes must be finite")
        if np.any(m < 0):
            raise ValidationError("moduli must be non-negative")
        object.__setattr__(self, "moduli", _freeze(m))
        object.__setattr__(self, "phases", _freeze(p))
        object.__setattr__(self, "n_qubits", dim.bit_length() - 1)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False, tol: float = NORM_TOL) -> "StateVector":
        a = np.asarray(amplitudes, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(a)):
            raise ValidationError("amplitudes must be finite")
        if normalize:
            norm = np.linalg.norm(a)
            if norm == 0:
                raise ValidationError("cannot normalize the zero vector")
            a = a / norm
        s = cls(np.abs(a), np.angle(a))
        s.check_norm(tol)
        return s

    @property
    def dim(self) -> int:
        return self.moduli.size

    @cached_property
    def amplitudes(self) -> np.ndarray:
        return _freeze(self.moduli * np.exp(1j * self.phases))

    def norm_squared(self) -> float:
        return float(np.sum(self.moduli ** 2))

    def check_norm(self, tol: float = NORM_TOL) -> None:
        dev = abs(self.norm_squared() - 1.0)
        if dev > tol:
            raise ValidationError(f"state norm deviates from 1 by {dev:.3e} (tol {tol:g})")

    def __len__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


# -- gates -----------------------------------------------------------------

@dataclass(frozen=True)
class Hadamard:
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    def describe(self) -> dict:
        return {"kind": "hadamard", "qubits": [self.target], "angle": None}


@dataclass(frozen=True)
class ControlledPhase:
    """``|0><0| + e^{i angle}|1><1|`` on ``target``, controlled by ``control``."""

    control: int
    target: int
    angle: float

    def __post_init__(self):
        if self.control == self.target:
            raise DomainError("controlled-phase needs distinct control and target")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def describe(self) -> dict:
        return {"kind": "controlled_phase", "qubits": [self.control, self.target], "angle": float(self.angle)}


@dataclass(frozen=True)
class PhaseKick:
    """Single-qubit ``diag(1, e^{i angle})``; the register-side effect of a controlled U^(2^j)."""

    target: int
    angle: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    def describe(self) -> dict:
        return {"kind": "phase_kick", "qubits": [self.target], "angle": float(self.angle)}


@dataclass(frozen=True, eq=False)
class Generic:
    """Full-register unitary, validated on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.array(self.matrix, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DomainError(f"generic gate needs a square matrix, got shape {u.shape}")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if dev > UNITARY_TOL:
            raise ValidationError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")
        object.__setattr__(self, "matrix", _freeze(u))

    @property
    def qubits(self) -> tuple[int, ...]:
        return ()

    def describe(self) -> dict:
        return {"kind": "generic", "qubits": [], "angle": None}


@dataclass(frozen=True, eq=False)
class Permutation:
    """Relabels basis states: the amplitude at ``x`` moves to ``perm[x]``."""

    perm: np.ndarray
    name: str = "permutation"

    def __post_init__(self):
        p = np.array(self.perm, dtype=np.int64)
        if p.ndim != 1 or not np.array_equal(np.sort(p), np.arange(p.size)):
            raise ValidationError("perm must be a permutation of range(2**n)")
        object.__setattr__(self, "perm", _freeze(p))

    @property
    def qubits(self) -> tuple[int, ...]:
        return ()

    def describe(self) -> dict:
        return {"kind": self.name, "qubits": [], "angle": None}


Gate = Union[Hadamard, ControlledPhase, PhaseKick, Generic, Permutation]
DIAGONAL_GATES = (ControlledPhase, PhaseKick)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DomainError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            _check_gate(g, self.n_qubits)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DomainError("cannot concatenate circuits of different width")
        return Circuit(self.n_qubits, self.gates + other.gates)


def _check_qubit(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise DomainError(f"qubit index {i} out of range for {n} qubits")


def _check_gate(g, n: int) -> None:
    for q in g.qubits:
        _check_qubit(q, n)
    if isinstance(g, Generic) and g.matrix.shape[0] != 1 << n:
        raise DomainError(f"generic gate of dimension {g.matrix.shape[0]} on a {n}-qubit register")
    if isinstance(g, Permutation) and g.perm.size != 1 << n:
        raise DomainError(f"permutation of length {g.perm.size} on a {n}-qubit register")


# -- operations ------------------------------------------------------------

def new_basis_state(n: int, index: int = 0) -> StateVector:
    if n < 1:
        raise DomainError("need at least one qubit")
    if not 0 <= index < 1 << n:
        raise DomainError(f"basis index {index} out of range for {n} qubits")
    m = np.zeros(1 << n)
    m[index] = 1.0
    return StateVector(m, np.zeros(1 << n))


def _bit_mask(n: int, qubit: int) -> np.ndarray:
    return ((np.arange(1 << n) >> qubit) & 1).astype(bool)


def _pair_view(a: np.ndarray, qubit: int) -> np.ndarray:
    # axis 1 of the view is bit `qubit`
    return a.reshape(-1, 2, 1 << qubit)


def _checked(out: StateVector, before: StateVector, tol: float) -> StateVector:
    dev = abs(out.norm_squared() - before.norm_squared())
    if dev > tol:
        raise InvariantError(f"gate changed the norm by {dev:.3e}")
    return out


def apply_hadamard(s: StateVector, i: int) -> StateVector:
    _check_qubit(i, s.n_qubits)
    c = _pair_view(s.amplitudes, i)
    out = np.empty_like(c)
    out[:, 0, :] = (c[:, 0, :] + c[:, 1, :]) * INV_SQRT2
    out[:, 1, :] = (c[:, 0, :] - c[:, 1, :]) * INV_SQRT2
    out = out.ravel()
    return _checked(StateVector(np.abs(out), np.angle(out)), s, NORM_TOL)


def apply_controlled_phase(s: StateVector, control: int, target: int, angle: float) -> StateVector:
    if control == target:
        raise DomainError("controlled-phase needs distinct control and target")
    _check_qubit(control, s.n_qubits)
    _check_qubit(target, s.n_qubits)
    mask = _bit_mask(s.n_qubits, control) & _bit_mask(s.n_qubits, target)
    return StateVector(s.moduli, np.where(mask, s.phases + angle, s.phases))


def apply_phase_kick(s: StateVector, target: int, angle: float) -> StateVector:
    _check_qubit(target, s.n_qubits)
    mask = _bit_mask(s.n_qubits, target)
    return StateVector(s.moduli, np.where(mask, s.phases + angle, s.phases))


def apply_generic(s: StateVector, u) -> StateVector:
    g = u if isinstance(u, Generic) else Generic(np.asarray(u))
    if g.matrix.shape[0] != s.dim:
        raise DomainError(f"unitary of dimension {g.matrix.shape[0]} applied to a state of dimension {s.dim}")
    out = g.matrix @ s.amplitudes
    return _checked(StateVector(np.abs(out), np.angle(out)), s, UNITARY_TOL)


def apply_permutation(s: StateVector, perm) -> StateVector:
    g = perm if isinstance(perm, Permutation) else Permutation(perm)
    if g.perm.size != s.dim:
        raise DomainError("permutation length does not match the state")
    m = np.empty_like(s.moduli)
    p = np.empty_like(s.phases)
    m[g.perm] = s.moduli
    p[g.perm] = s.phases
    return StateVector(m, p)


def apply_gate(s: StateVector, g) -> StateVector:
    if isinstance(g, Hadamard):
        return apply_hadamard(s, g.target)
    if isinstance(g, ControlledPhase):
        return apply_controlled_phase(s, g.control, g.target, g.angle)
    if isinstance(g, PhaseKick):
        return apply_phase_kick(s, g.target, g.angle)
    if isinstance(g, Generic):
        return apply_generic(s, g)
    if isinstance(g, Permutation):
        return apply_permutation(s, g)
    raise TypeError(f"unknown gate {g!r}")


def run_circuit(circuit: Circuit, s: StateVector) -> StateVector:
    if circuit.n_qubits != s.n_qubits:
        raise DomainError(f"{circuit.n_qubits}-qubit circuit on a {s.n_qubits}-qubit state")
    for g in circuit:
        s = apply_gate(s, g)
    return s


def probabilities(s: StateVector) -> np.ndarray:
    return s.moduli ** 2


def entanglement_entropy(s: StateVector, cut: Iterable[int]) -> float:
    """Von Neumann entropy in bits of the reduced state on the qubits in ``cut``."""
    n = s.n_qubits
    cut = sorted(set(int(q) for q in cut))
    if not cut or len(cut) >= n:
        raise DomainError("cut must be a nonempty proper subset of the qubits")
    for q in cut:
        _check_qubit(q, n)
    rest = [q for q in range(n) if q not in cut]
    # C-order reshape puts qubit q on axis n-1-q
    psi = s.amplitudes.reshape([2] * n)
    psi = np.transpose(psi, [n - 1 - q for q in cut] + [n - 1 - q for q in rest])
    sv = np.linalg.svd(psi.reshape(1 << len(cut), -1), compute_uv=False)
    p = sv ** 2
    p = p[p > 1e-300]
    return max(0.0, float(-np.sum(p * np.log2(p))))


# -- full-matrix route (oracle for the pair/diagonal traversal) -------------

_H2 = np.array([[1, 1], [1, -1]], dtype=np.complex128) * INV_SQRT2


def _embed_1q(m2: np.ndarray, qubit: int, n: int) -> np.ndarray:
    out = np.eye(1, dtype=np.complex128)
    for q in range(n - 1, -1, -1):
        out = np.kron(out, m2 if q == qubit else np.eye(2))
    return out


def gate_matrix(g, n: int) -> np.ndarray:
    """Dense 2**n x 2**n matrix of ``g``, built from Kronecker products."""
    _check_gate(g, n)
    if isinstance(g, Hadamard):
        return _embed_1q(_H2, g.target, n)
    if isinstance(g, PhaseKick):
        return _embed_1q(np.diag([1.0, np.exp(1j * g.angle)]), g.target, n)
    if isinstance(g, ControlledPhase):
        p1 = np.diag([0.0, 1.0]).astype(np.complex128)
        proj = _embed_1q(p1, g.control, n) @ _embed_1q(p1, g.target, n)
        return np.eye(1 << n) + (np.exp(1j * g.angle) - 1) * proj
    if isinstance(g, Generic):
        return np.array(g.matrix)
    if isinstance(g, Permutation):
        m = np.zeros((1 << n, 1 << n), dtype=np.complex128)
        m[g.perm, np.arange(1 << n)] = 1.0
        return m
    raise TypeError(f"unknown gate {g!r}")


def circuit_matrix(circuit: Circuit) -> np.ndarray:
    u = np.eye(1 << circuit.n_qubits, dtype=np.complex128)
    for g in circuit:
        u = gate_matrix(g, circuit.n_qubits) @ u
    return u


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector.from_amplitudes(a, normalize=True)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
