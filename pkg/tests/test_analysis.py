import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmaj.analysis import (
    hadamard_doubly_stochastic,
    hadamard_interference,
    hpair_pairing,
    hpair_propagation_check,
    hpair_report,
    interference_residuals,
    pair_interference_vanishes,
)
from qmaj.circuits import build_pea_register_state, grover_initial, grover_kernel, grover_trajectory, qft_canonical
from qmaj.distmaj import Relation, hadamard_mixture_witness
from qmaj.errors import DomainError
from qmaj.statevec import (
    Hadamard,
    StateVector,
    apply_gate,
    apply_hadamard,
    new_basis_state,
    probabilities,
    random_state,
    random_unitary,
)


@pytest.mark.parametrize(
    "n, i, pairs",
    [(2, 0, [(0, 1), (2, 3)]), (2, 1, [(0, 2), (1, 3)]), (1, 0, [(0, 1)]), (3, 2, [(0, 4), (1, 5), (2, 6), (3, 7)])],
)
def test_pairing_examples(n, i, pairs):
    assert hpair_pairing(n, i) == pairs


def test_pairing_bad_qubit():
    with pytest.raises(DomainError):
        hpair_pairing(2, 2)


@pytest.mark.parametrize("phi", [0.3, 1 / 3, 0.0, 5 / 8])
def test_hpairs_hold_on_pea_register(phi):
    n = 3
    s = build_pea_register_state(n, phi)
    for i in range(n):
        r = hpair_report(s, i)
        assert r.holds and r.pair_count == 4
        alpha = -2 * math.pi * phi * 2 ** i
        want = math.remainder(alpha, 2 * math.pi)
        diffs = [math.remainder(p - want, 2 * math.pi) for p in r.phase_list]
        assert max(abs(d) for d in diffs) < 1e-12


def test_hpairs_fail_on_basis_state():
    r = hpair_report(new_basis_state(1, 0), 0)
    assert not r.holds
    assert r.max_modulus_deviation == 1.0
    assert np.isnan(r.phase_list[0])


def test_hpairs_deviation_reported():
    s = StateVector.from_amplitudes([math.sqrt(0.9), math.sqrt(0.1)])
    r = hpair_report(s, 0)
    assert not r.holds
    assert r.max_modulus_deviation == pytest.approx(math.sqrt(0.9) - math.sqrt(0.1), abs=1e-15)


@pytest.mark.parametrize("phi", [0.3, 1 / 3, 0.71])
def test_hpairs_propagate_through_qft(phi):
    n = 4
    s = build_pea_register_state(n, phi)
    remaining = set(range(n))
    for g in qft_canonical(n).gates:
        if isinstance(g, Hadamard):
            remaining.discard(g.target)
            reports = hpair_propagation_check(s, g.target, remaining)
            assert all(r.holds for r in reports.values())
        s = apply_gate(s, g)
        for j in remaining:
            assert hpair_report(s, j).holds


def test_propagation_rejects_applied_in_remaining():
    with pytest.raises(DomainError):
        hpair_propagation_check(build_pea_register_state(2, 0.1), 0, [0, 1])


@pytest.mark.parametrize(
    "c0, c1, vanishes",
    [
        (1 / math.sqrt(2), 1j / math.sqrt(2), True),
        (math.sqrt(0.9), math.sqrt(0.1), False),
        (0, 0, True),
        (0.5 * np.exp(0.3j), -0.5, True),
    ],
)
def test_pair_interference_examples(c0, c1, vanishes):
    assert pair_interference_vanishes(c0, c1) is vanishes
    # the cross term it stands for
    cross = (np.conj(c0 + c1) * (c0 - c1)).real
    assert bool(abs(cross) < 1e-12) is vanishes


def test_pea_hadamard_is_natural():
    s = build_pea_register_state(3, 0.3)
    r = hadamard_interference(s, 2)
    assert r.max_residual < 1e-12
    assert r.natural and r.stochastic.ok
    assert r.verdict_if_natural.relation is Relation.SECOND_MAJORIZES_FIRST


def grover_residual_oracle(theta, after):
    """Cross term of a real 2x2 rotation: +-2 cos(t) sin(t) a' b'."""
    c = 2 * math.cos(theta) * math.sin(theta) * after[0] * after[1]
    return np.array([c, -c])


@pytest.mark.parametrize("n", range(2, 9))
def test_grover_residuals_match_oracle(n):
    k = grover_kernel(n)
    theta = math.acos(1 - 2 / 2 ** n)
    traj = grover_trajectory(n, 3)
    for before, after in zip(traj, traj[1:]):
        r = interference_residuals(k, StateVector.from_amplitudes(before.as_vector()))
        np.testing.assert_allclose(r.residuals, grover_residual_oracle(theta, after.as_vector()), atol=1e-14)


def test_grover_n2_first_step_lands_on_basis_state():
    # after one iteration the reduced state is (0, 1), so the cross term vanishes
    r = interference_residuals(grover_kernel(2), StateVector.from_amplitudes(grover_initial(2).as_vector()))
    assert r.max_residual < 1e-15
    r3 = interference_residuals(grover_kernel(3), StateVector.from_amplitudes(grover_initial(3).as_vector()))
    assert not r3.natural and r3.max_residual > 1e-3


def test_permutation_unitary_has_no_interference(rng):
    perm = np.eye(8)[rng.permutation(8)]
    r = interference_residuals(perm, random_state(3, rng))
    assert r.max_residual < 1e-15
    assert r.verdict_if_natural.relation is Relation.EQUIVALENT


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_residual_identity_and_stochasticity(n, rng):
    for _ in range(5):
        u = random_unitary(2 ** n, rng)
        s = random_state(n, rng)
        r = interference_residuals(u, s)
        assert r.stochastic.ok
        p_after = np.abs(u @ s.amplitudes) ** 2
        np.testing.assert_allclose(probabilities(s), r.D @ p_after + r.residuals, atol=1e-14)
        # residuals of a doubly stochastic map sum to zero
        assert abs(r.residuals.sum()) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 6])
def test_hadamard_dense_and_sparse_routes_agree(n, rng):
    s = random_state(n, rng)
    for i in range(n):
        dense = hadamard_interference(s, i)
        sparse = hadamard_interference(s, i, dense_max_qubits=0)
        np.testing.assert_allclose(dense.D, hadamard_doubly_stochastic(n, i).toarray(), atol=1e-15)
        np.testing.assert_allclose(dense.residuals, sparse.residuals, atol=1e-14)
        assert dense.natural == sparse.natural
        assert sparse.stochastic.ok


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6), st.booleans())
def test_hpair_holds_iff_every_pair_vanishes(seed, n, structured):
    rng = np.random.default_rng(seed)
    s = build_pea_register_state(n, float(rng.random())) if structured else random_state(n, rng)
    i = int(rng.integers(n))
    c = s.amplitudes
    every = all(pair_interference_vanishes(c[a], c[b]) for a, b in hpair_pairing(n, i))
    assert hpair_report(s, i).holds == every
    if every:
        assert hadamard_interference(s, i).natural


def test_mixture_witness_on_pea_register():
    n = 3
    s = build_pea_register_state(n, 1 / 3)
    for i in range(n):
        after = apply_hadamard(s, i)
        w = hadamard_mixture_witness(probabilities(s), probabilities(after), hpair_pairing(n, i))
        assert w < 1e-12
