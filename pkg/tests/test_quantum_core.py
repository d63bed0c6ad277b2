import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtutte.errors import InvalidInputError
from qtutte.quantum import (CX, Circuit, Controlled, Diag, H, I, P, StateVector, TOFFOLI,
                            TwoLevel, Unitary, X, Z, apply, branch_probability,
                            circuit_unitary, is_strict, measure_qubit, project, run, ry_matrix)
from qtutte.rng import Xorshift64Star
from oracles import full_operator, random_gate


def test_named_matrices():
    np.testing.assert_allclose(H.matrix() @ H.matrix(), np.eye(2), atol=1e-15)
    # CX: control is the first target (local LSB)
    cx = CX.matrix()
    assert cx[3, 1] == 1 and cx[1, 3] == 1 and cx[0, 0] == 1 and cx[2, 2] == 1
    tof = TOFFOLI.matrix()
    assert tof[7, 3] == 1 and tof[3, 7] == 1


def test_single_qubit_actions():
    s = apply(StateVector.basis(2, 0), X, [1])
    assert s.amps[2] == 1
    s = apply(StateVector.basis(1, 0), H, [0])
    np.testing.assert_allclose(s.amps, [2 ** -0.5, 2 ** -0.5])
    s = apply(StateVector.basis(1, 1), P(np.pi / 3), [0])
    np.testing.assert_allclose(s.amps[1], np.exp(1j * np.pi / 3))


def test_controls_fire_only_when_set():
    g = Controlled(X, (0,))
    assert apply(StateVector.basis(2, 0b00), g, [1]).amps[0b00] == 1
    assert apply(StateVector.basis(2, 0b01), g, [1]).amps[0b11] == 1
    nested = Controlled(Controlled(X, (0,)), (1,))
    assert nested.controls == (1, 0)
    assert apply(StateVector.basis(3, 0b011), nested, [2]).amps[0b111] == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32))
def test_apply_matches_kronecker_oracle(q, seed):
    rng = np.random.default_rng(seed)
    gate, targets = random_gate(rng, q)
    psi = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
    psi /= np.linalg.norm(psi)
    got = apply(StateVector(q, psi), gate, targets).amps
    np.testing.assert_allclose(got, full_operator(q, gate, targets) @ psi, atol=1e-10)


def test_every_gate_kind_is_unitary():
    rng = np.random.default_rng(0)
    for _ in range(300):
        gate, targets = random_gate(rng, 4)
        u = gate.matrix()
        assert np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) <= 1e-10
        np.testing.assert_allclose(gate.adjoint().matrix(), u.conj().T, atol=1e-12)


def test_circuit_inverse_and_unitary():
    rng = np.random.default_rng(1)
    circ = Circuit(3)
    for _ in range(25):
        gate, targets = random_gate(rng, 3)
        circ.add(gate, *targets)
    u = circuit_unitary(circ)
    ref = np.eye(8, dtype=complex)
    for gate, targets in circ.ops:
        ref = full_operator(3, gate, targets) @ ref
    np.testing.assert_allclose(u, ref, atol=1e-10)
    np.testing.assert_allclose(circuit_unitary(circ.inverse()) @ u, np.eye(8), atol=1e-10)


def test_circuit_extend_with_mapping():
    inner = Circuit(2).add(CX, 0, 1).add(Controlled(P(0.3), (0,)), 1)
    outer = Circuit(4).extend(inner, [3, 1])
    assert outer.ops[0][1] == (3, 1)
    assert outer.ops[1][0].controls == (3,)


def test_target_validation():
    with pytest.raises(InvalidInputError):
        apply(StateVector.basis(2), CX, [0])
    with pytest.raises(InvalidInputError):
        apply(StateVector.basis(2), X, [2])
    with pytest.raises(InvalidInputError):
        apply(StateVector.basis(2), Controlled(X, (0,)), [0])
    with pytest.raises(InvalidInputError):
        StateVector(2, np.ones(3))


def test_norm_preserved_over_many_gates():
    rng = np.random.default_rng(2)
    q = 6
    gates = [random_gate(rng, q) for _ in range(200)]
    state = StateVector.basis(q, 5)
    for step in range(10_000):
        gate, targets = gates[step % len(gates)]
        state = apply(state, gate, targets)
    assert abs(state.norm() - 1.0) <= 1e-10


def test_strict_gate_set():
    assert is_strict(H) and is_strict(P(0.1)) and is_strict(Controlled(X, (1, 2)))
    assert is_strict(Controlled(P(0.1), (3,)))
    assert not is_strict(Diag([1, 1j])) and not is_strict(Controlled(H, (0,)))


def test_projection_and_branch_probability():
    s = StateVector.from_vector([0.6, 0, 0, 0.8])
    assert branch_probability(s, 0, 1) == pytest.approx(0.64)
    p = project(s, 1, 1)
    np.testing.assert_allclose(p.amps, [0, 0, 0, 1])
    with pytest.raises(InvalidInputError):
        project(StateVector.basis(1, 0), 0, 1)


def test_measurement_statistics():
    s = apply(StateVector.basis(1), TwoLevel(ry_matrix(2 * np.arcsin(np.sqrt(0.3))), 0, 1), [0])
    rng = Xorshift64Star(17)
    ones = sum(measure_qubit(s, 0, rng)[0] for _ in range(20000))
    # binomial standard deviation is ~0.0032
    assert abs(ones / 20000 - 0.3) < 0.015


def test_tensor_order():
    a = StateVector.basis(1, 1)
    b = StateVector.basis(2, 2)
    assert np.argmax(np.abs(a.tensor(b).amps)) == 1 + (2 << 1)


def test_run_checks_width():
    with pytest.raises(InvalidInputError):
        run(Circuit(2), StateVector.basis(3))
