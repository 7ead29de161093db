import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmaj.errors import DomainError, ValidationError
from qmaj.statevec import (
    Circuit,
    ControlledPhase,
    Generic,
    Hadamard,
    PhaseKick,
    StateVector,
    apply_controlled_phase,
    apply_generic,
    apply_hadamard,
    apply_phase_kick,
    circuit_matrix,
    entanglement_entropy,
    new_basis_state,
    probabilities,
    random_state,
    random_unitary,
    run_circuit,
)

S = 1 / math.sqrt(2)
H2 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def amps(s):
    return np.asarray(s.amplitudes)


@pytest.mark.parametrize(
    "n, index, expected",
    [(1, 0, [1, 0]), (2, 3, [0, 0, 0, 1]), (3, 0, [1, 0, 0, 0, 0, 0, 0, 0])],
)
def test_basis_state(n, index, expected):
    s = new_basis_state(n, index)
    np.testing.assert_array_equal(amps(s), expected)
    np.testing.assert_array_equal(probabilities(s), expected)
    assert s.norm_squared() == 1.0


@pytest.mark.parametrize("index", [-1, 4, 100])
def test_basis_state_out_of_range(index):
    with pytest.raises(DomainError):
        new_basis_state(2, index)


def test_state_rejects_bad_norm_and_length():
    with pytest.raises(ValidationError):
        StateVector.from_amplitudes([1, 1])
    with pytest.raises(ValidationError):
        StateVector.from_amplitudes([1, 0, 0])
    with pytest.raises(ValidationError):
        StateVector.from_amplitudes([np.nan, 0])


def test_state_is_immutable():
    s = new_basis_state(2, 1)
    with pytest.raises(ValueError):
        s.moduli[0] = 1.0


def test_hadamard_uniform():
    out = apply_hadamard(new_basis_state(1, 0), 0)
    np.testing.assert_allclose(amps(out), [S, S], atol=1e-15)


def test_hadamard_phase_pi_goes_to_one():
    s = StateVector.from_amplitudes([S, S * np.exp(1j * math.pi)])
    expected = H2 @ np.array([S, S * np.exp(1j * math.pi)])  # direct 2x2 multiply
    np.testing.assert_allclose(expected, [0, 1], atol=1e-15)
    np.testing.assert_allclose(amps(apply_hadamard(s, 0)), expected, atol=1e-15)


def test_hadamard_pair_formula(rng):
    s = random_state(3, rng)
    c = amps(s)
    out = amps(apply_hadamard(s, 1))
    for x in range(8):
        if not (x >> 1) & 1:
            c0, c1 = c[x], c[x + 2]
            assert abs(out[x] - (c0 + c1) / math.sqrt(2)) < 1e-15
            assert abs(out[x + 2] - (c0 - c1) / math.sqrt(2)) < 1e-15


def test_hadamard_bad_index():
    with pytest.raises(DomainError):
        apply_hadamard(new_basis_state(2, 0), 2)


def test_controlled_phase_example():
    s = StateVector.from_amplitudes([0.5, 0.5, 0.5, 0.5])
    diag = np.diag([1, 1, 1, np.exp(1j * math.pi / 2)])  # oracle: diagonal matrix
    expected = diag @ np.full(4, 0.5)
    np.testing.assert_allclose(expected, [0.5, 0.5, 0.5, 0.5j], atol=1e-16)
    out = apply_controlled_phase(s, 0, 1, math.pi / 2)
    np.testing.assert_allclose(amps(out), expected, atol=1e-15)


def test_controlled_phase_inactive_control(rng):
    a = np.zeros(8, dtype=complex)
    a[[0, 2, 4, 6]] = rng.normal(size=4) + 1j * rng.normal(size=4)  # bit 0 never set
    s = StateVector.from_amplitudes(a, normalize=True)
    out = apply_controlled_phase(s, 0, 2, 1.234)
    np.testing.assert_array_equal(amps(out), amps(s))


def test_controlled_phase_same_qubit():
    with pytest.raises(DomainError):
        apply_controlled_phase(new_basis_state(2, 0), 1, 1, 0.1)
    with pytest.raises(DomainError):
        ControlledPhase(0, 0, 0.1)


def test_phase_kick_example():
    s = StateVector.from_amplitudes([S, S])
    out = apply_phase_kick(s, 0, -2 * math.pi * 0.5)
    np.testing.assert_allclose(amps(out), [S, -S], atol=1e-15)


def test_phase_kick_zero_is_identity(rng):
    s = random_state(3, rng)
    out = apply_phase_kick(s, 2, 0.0)
    np.testing.assert_array_equal(amps(out), amps(s))


def test_generic_identity_and_inverse(rng):
    s = random_state(3, rng)
    np.testing.assert_allclose(amps(apply_generic(s, np.eye(8))), amps(s), atol=1e-15)
    u = random_unitary(8, rng)
    back = apply_generic(apply_generic(s, u), u.conj().T)
    np.testing.assert_allclose(amps(back), amps(s), atol=1e-10)


def test_generic_grover_kernel_n2():
    theta = math.pi / 3
    k = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    v = np.array([math.sqrt(3) / 2, 0.5])
    expected = k @ v  # rotation from 30 to 90 degrees
    np.testing.assert_allclose(expected, [0, 1], atol=1e-15)
    out = apply_generic(StateVector.from_amplitudes(v), k)
    np.testing.assert_allclose(amps(out), expected, atol=1e-15)


def test_generic_errors():
    with pytest.raises(DomainError):
        apply_generic(new_basis_state(2, 0), np.eye(2))
    with pytest.raises(ValidationError):
        Generic(np.array([[1, 1], [0, 1]]))
    with pytest.raises(DomainError):
        Generic(np.ones((2, 3)))


@pytest.mark.parametrize("delta", [0.0, 0.3, math.pi, -2.0])
def test_probabilities_drop_phases(delta):
    s = StateVector.from_amplitudes([S, S * np.exp(1j * delta)])
    np.testing.assert_allclose(probabilities(s), [0.5, 0.5], atol=1e-15)


def test_probabilities_uniform():
    s = apply_hadamard(apply_hadamard(new_basis_state(2, 0), 0), 1)
    np.testing.assert_allclose(probabilities(s), [0.25] * 4, atol=1e-15)


# -- entanglement ----------------------------------------------------------

def test_entropy_product_state(rng):
    q0, q1, q2 = (random_state(1, rng).amplitudes for _ in range(3))
    s = StateVector.from_amplitudes(np.kron(q2, np.kron(q1, q0)))
    for cut in ([0], [1], [2], [0, 2]):
        assert entanglement_entropy(s, cut) < 1e-10


def test_entropy_bell():
    s = StateVector.from_amplitudes([S, 0, 0, S])
    assert abs(entanglement_entropy(s, {0}) - 1.0) < 1e-12


def test_entropy_cz_on_plus_plus():
    s = apply_hadamard(apply_hadamard(new_basis_state(2, 0), 0), 1)
    s = apply_controlled_phase(s, 0, 1, math.pi)
    # oracle: singular values of the amplitude matrix 1/2 [[1, 1], [1, -1]]
    sv = np.linalg.svd(0.5 * np.array([[1, 1], [1, -1]]), compute_uv=False)
    p = sv ** 2
    expected = -np.sum(p * np.log2(p))
    assert abs(expected - 1.0) < 1e-12
    assert abs(entanglement_entropy(s, [0]) - expected) < 1e-12


@pytest.mark.parametrize("cut", [[], [0, 1], [3]])
def test_entropy_bad_cut(cut):
    with pytest.raises(DomainError):
        entanglement_entropy(new_basis_state(2, 0), cut)


# -- properties -------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 6))
def test_gates_preserve_norm_and_hadamard_involution(seed, n):
    rng = np.random.default_rng(seed)
    s = random_state(n, rng)
    i = int(rng.integers(n))
    once = apply_hadamard(s, i)
    assert abs(once.norm_squared() - 1) < 1e-12
    np.testing.assert_allclose(amps(apply_hadamard(once, i)), amps(s), atol=1e-12)
    kicked = apply_phase_kick(s, i, float(rng.normal()))
    assert abs(kicked.norm_squared() - 1) < 1e-12


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 6))
def test_controlled_phase_moduli_bit_identical(seed, n):
    rng = np.random.default_rng(seed)
    s = random_state(n, rng)
    c, t = rng.choice(n, size=2, replace=False)
    out = apply_controlled_phase(s, int(c), int(t), float(rng.normal() * 10))
    np.testing.assert_array_equal(out.moduli, s.moduli)
    np.testing.assert_array_equal(probabilities(out), probabilities(s))


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(3, 6))
def test_controlled_phases_on_same_target_commute(seed, n):
    rng = np.random.default_rng(seed)
    s = random_state(n, rng)
    t, c1, c2 = (int(q) for q in rng.choice(n, size=3, replace=False))
    a1, a2 = rng.normal(size=2)
    ab = apply_controlled_phase(apply_controlled_phase(s, c1, t, a1), c2, t, a2)
    ba = apply_controlled_phase(apply_controlled_phase(s, c2, t, a2), c1, t, a1)
    np.testing.assert_allclose(amps(ab), amps(ba), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 6))
def test_local_gates_keep_entropy(seed, n):
    rng = np.random.default_rng(seed)
    s = random_state(n, rng)
    k = int(rng.integers(1, n))
    cut = [int(q) for q in rng.choice(n, size=k, replace=False)]
    before = entanglement_entropy(s, cut)
    q = int(rng.integers(n))
    assert abs(entanglement_entropy(apply_hadamard(s, q), cut) - before) < 1e-10
    assert abs(entanglement_entropy(apply_phase_kick(s, q, 0.7), cut) - before) < 1e-10


def _random_circuit(n, rng, length=12):
    gates = []
    for _ in range(length):
        kind = rng.integers(3) if n > 1 else rng.integers(2)
        if kind == 0:
            gates.append(Hadamard(int(rng.integers(n))))
        elif kind == 1:
            gates.append(PhaseKick(int(rng.integers(n)), float(rng.normal() * 3)))
        else:
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(ControlledPhase(int(c), int(t), float(rng.normal() * 3)))
    return Circuit(n, gates)


@pytest.mark.parametrize("n", range(1, 7))
def test_gate_by_gate_matches_full_matrix(n, rng):
    for _ in range(5):
        circ = _random_circuit(n, rng)
        s = random_state(n, rng)
        direct = amps(run_circuit(circ, s))
        via_matrix = amps(apply_generic(s, circuit_matrix(circ)))
        np.testing.assert_allclose(direct, via_matrix, atol=1e-10)


def test_circuit_validates_indices():
    with pytest.raises(DomainError):
        Circuit(2, [Hadamard(2)])
    with pytest.raises(DomainError):
        Circuit(2, [Generic(np.eye(2))])
