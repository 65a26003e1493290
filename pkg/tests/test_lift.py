import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftedqc.linalg import DimensionError, HADAMARD, kron, make_rng
from liftedqc.lift import (
    ClassicalGate,
    ClassicalGateSet,
    JointState,
    apply_classical_gate,
    basis_target,
    build_parity_gateset,
    build_swap_gateset,
    conditional_operator,
    control_unitary,
    controlled_apply,
    index_to_label,
    joint_state,
    label_to_index,
    lift_step,
    measure_control,
    measure_target_classical,
    pair_labels,
    relabel_control,
    reset_control,
)

from conftest import ScriptedRng, random_state, random_unitary

SQ2 = 1.0 / np.sqrt(2.0)


# --- labels and basis ordering ---------------------------------------------------

def test_label_index_round_trip():
    for dim in (3, 5, 7):
        for idx in range(dim):
            assert label_to_index(index_to_label(idx), dim) == idx


def test_label_ordering_convention():
    assert index_to_label(0) == "1"
    assert index_to_label(1) == "G1@1"
    assert index_to_label(2) == "G2@1"
    assert index_to_label(3) == "G1@2"
    assert index_to_label(4) == "G2@2"


def test_label_errors():
    with pytest.raises(ValueError):
        label_to_index("G3@1", 5)
    with pytest.raises(ValueError):
        label_to_index("G1@3", 5)  # out of range for n=2
    with pytest.raises(ValueError):
        label_to_index("junk", 5)


# --- gate set construction -------------------------------------------------------

def test_parity_gateset_n1_matrices():
    g = build_parity_gateset(1)
    assert g.control_dim == 3 and g.target_dim == 4
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    cnot = np.eye(4, dtype=complex)[:, [0, 1, 3, 2]]
    assert np.array_equal(g.gate("G1@1").matrix(), kron(x, eye))
    assert np.array_equal(g.gate("G2@1").matrix(), cnot)
    assert np.array_equal(g.gate("1").matrix(), np.eye(4))


def test_parity_gateset_locality():
    g = build_parity_gateset(2)
    # G1@2 must act as NOT on physical qubit 3 (of 4), identity on qubit 1-2
    gate = g.gate("G1@2")
    for x in range(16):
        assert gate.perm[x] == x ^ 0b0010


def test_swap_gateset_n1_permutations():
    g = build_swap_gateset(1)
    assert g.control_dim == 3 and g.target_dim == 16
    # G1 swaps qubits (1,3) and (2,4): |1000> <-> |0010>, |0100> <-> |0001>
    g1 = g.gate("G1@1")
    assert g1.perm[0b1000] == 0b0010
    assert g1.perm[0b0100] == 0b0001
    assert g1.perm[0b1100] == 0b0011
    # G2 swaps qubits (1,2)
    g2 = g.gate("G2@1")
    assert g2.perm[0b1000] == 0b0100
    assert g2.perm[0b0010] == 0b0010


@pytest.mark.parametrize("builder,n", [
    (build_parity_gateset, 1), (build_parity_gateset, 3),
    (build_swap_gateset, 1), (build_swap_gateset, 2),
])
def test_gates_are_involutions(builder, n):
    g = builder(n)
    for gate in g.gates:
        assert np.array_equal(gate.perm[gate.perm], np.arange(g.target_dim))


def test_gateset_validation():
    with pytest.raises(ValueError):
        ClassicalGate("bad", np.array([0, 0, 1]))
    ident = ClassicalGate("1", np.arange(4))
    with pytest.raises(ValueError):
        ClassicalGateSet((ident,), 4, 1, 2)  # wrong gate count
    with pytest.raises(ValueError):
        build_parity_gateset(0)
    with pytest.raises(DimensionError):
        build_parity_gateset(20)


def test_gate_apply_matches_matrix(rng):
    g = build_parity_gateset(2)
    psi = random_state(g.target_dim, rng)
    for gate in g.gates:
        assert np.allclose(gate.apply(psi), gate.matrix() @ psi, atol=1e-14)


# --- joint states ----------------------------------------------------------------

def test_joint_state_and_basis_target():
    g = build_parity_gateset(1)
    s = joint_state(g, "G2@1", basis_target(g, "10"))
    assert list(s.control_support()) == [2]
    assert np.array_equal(s.target_vector(), basis_target(g, "10"))
    assert s.n_pairs == 1 and s.qubits_per_pair == 2


def test_basis_target_validation():
    g = build_parity_gateset(1)
    with pytest.raises(ValueError):
        basis_target(g, "102")
    with pytest.raises(ValueError):
        basis_target(g, "1")


def test_target_vector_requires_basis_control():
    g = build_parity_gateset(1)
    s = joint_state(g, "1", basis_target(g, "10"))
    s = control_unitary(s, HADAMARD, ("1", "G2@1"))
    with pytest.raises(ValueError):
        s.target_vector()


# --- primitives ------------------------------------------------------------------

def test_controlled_apply_on_basis_blocks():
    g = build_parity_gateset(1)
    # |G1> (x) |00>  ->  |G1> (x) |10>
    s = joint_state(g, "G1@1", basis_target(g, "00"))
    out = controlled_apply(s, g)
    assert np.array_equal(out.target_vector(), basis_target(g, "10"))
    # identity branch untouched
    s = joint_state(g, "1", basis_target(g, "00"))
    out = controlled_apply(s, g)
    assert np.array_equal(out.target_vector(), basis_target(g, "00"))


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_controlled_apply_matches_block_diagonal_matrix(seed):
    g = build_parity_gateset(1)
    rng = np.random.default_rng(seed)
    amps = random_state(g.control_dim * g.target_dim, rng)
    state = JointState(amps, g.control_dim, g.target_dim)
    blocks = [gate.matrix() for gate in g.gates]
    dense = np.zeros((amps.size, amps.size), dtype=complex)
    t = g.target_dim
    for i, b in enumerate(blocks):
        dense[i * t:(i + 1) * t, i * t:(i + 1) * t] = b
    out = controlled_apply(state, g)
    assert np.allclose(out.amplitudes, dense @ amps, atol=1e-12)


def test_apply_classical_gate_is_unconditional(rng):
    g = build_parity_gateset(1)
    s = joint_state(g, "1", basis_target(g, "00"))
    s = control_unitary(s, HADAMARD, ("1", "G2@1"))
    out = apply_classical_gate(s, g, "G1@1")
    table = out.table()
    # both control branches got NOT on qubit 1: |00> -> |10>
    assert abs(table[0, int("10", 2)]) == pytest.approx(SQ2)
    assert abs(table[2, int("10", 2)]) == pytest.approx(SQ2)


def test_control_unitary_subspace_only():
    g = build_parity_gateset(2)
    s = joint_state(g, "1", basis_target(g, "0000"))
    out = control_unitary(s, HADAMARD, ("1", "G2@2"))
    table = out.table()
    assert table[0, 0] == pytest.approx(SQ2)
    assert table[4, 0] == pytest.approx(SQ2)
    assert np.all(table[[1, 2, 3]] == 0)


def test_control_unitary_validation():
    g = build_parity_gateset(1)
    s = joint_state(g, "1", basis_target(g, "00"))
    with pytest.raises(ValueError):
        control_unitary(s, np.array([[1, 1], [0, 1]]), ("1", "G2@1"))
    with pytest.raises(ValueError):
        control_unitary(s, HADAMARD, ("1", "1"))
    with pytest.raises(DimensionError):
        control_unitary(s, np.eye(3), ("1", "G2@1"))


def test_relabel_control_swaps_pairs():
    g = build_parity_gateset(2)
    s = joint_state(g, "G2@1", basis_target(g, "0000"))
    out = relabel_control(s, 1, 2)
    assert list(out.control_support()) == [label_to_index("G2@2", g.control_dim)]
    # involution
    back = relabel_control(out, 1, 2)
    assert np.array_equal(back.amplitudes, s.amplitudes)


def test_relabel_control_out_of_range():
    g = build_parity_gateset(2)
    s = joint_state(g, "1", basis_target(g, "0000"))
    with pytest.raises(ValueError):
        relabel_control(s, 1, 3)


def test_reset_control_moves_basis_state():
    g = build_parity_gateset(1)
    s = joint_state(g, "G2@1", basis_target(g, "10"))
    out = reset_control(s, "1")
    assert list(out.control_support()) == [0]
    assert np.array_equal(out.target_vector(), basis_target(g, "10"))


def test_reset_control_rejects_superposition():
    g = build_parity_gateset(1)
    s = joint_state(g, "1", basis_target(g, "10"))
    s = control_unitary(s, HADAMARD, ("1", "G2@1"))
    with pytest.raises(ValueError):
        reset_control(s, "1")


# --- measurements ----------------------------------------------------------------

def test_measure_control_forced_outcomes():
    g = build_parity_gateset(1)
    s = joint_state(g, "1", basis_target(g, "10"))
    s = control_unitary(s, HADAMARD, ("1", "G2@1"))
    # probabilities: 1/2 on index 0 ("1"), 1/2 on index 2 ("G2@1")
    label, post, p = measure_control(s, ScriptedRng([0.25]))
    assert label == "1" and p == pytest.approx(0.5)
    assert list(post.control_support()) == [0]
    label, post, p = measure_control(s, ScriptedRng([0.75]))
    assert label == "G2@1" and p == pytest.approx(0.5)


def test_measure_target_classical_on_encoded_pair():
    g = build_parity_gateset(1)
    # (|10> - |11>)/sqrt(2): qubit pair measurement gives "10" or "11", p=1/2
    target = (basis_target(g, "10") - basis_target(g, "11")) * SQ2
    s = joint_state(g, "1", target)
    bits, post, p = measure_target_classical(s, 1, ScriptedRng([0.1]))
    assert bits == "10" and p == pytest.approx(0.5)
    assert np.allclose(post.target_vector(), basis_target(g, "10"), atol=1e-12)
    bits, _, p = measure_target_classical(s, 1, ScriptedRng([0.9]))
    assert bits == "11" and p == pytest.approx(0.5)


def test_measure_target_classical_leaves_other_pairs_coherent():
    g = build_parity_gateset(2)
    g1 = build_parity_gateset(1)
    psi = np.kron(
        (basis_target(g1, "10") - basis_target(g1, "11")) * SQ2,
        (basis_target(g1, "00") + basis_target(g1, "01")) * SQ2,
    )
    s = joint_state(g, "1", psi)
    bits, post, p = measure_target_classical(s, 1, ScriptedRng([0.1]))
    assert bits == "10" and p == pytest.approx(0.5)
    # pair 2 superposition is untouched
    tv = post.target_vector()
    assert abs(tv[int("1000", 2)]) == pytest.approx(SQ2)
    assert abs(tv[int("1001", 2)]) == pytest.approx(SQ2)


# --- the lift step vs its algebraic oracle ---------------------------------------

def test_lift_step_hadamard_round_from_classical_state():
    """H/H round from |1> (x) |10>: outcome "1" leaves (|10>+|11>)/sqrt(2),
    outcome "G2@1" leaves (|10>-|11>)/sqrt(2); both have probability 1/2."""
    g = build_parity_gateset(1)
    s = joint_state(g, "1", basis_target(g, "10"))
    res = lift_step(s, HADAMARD, HADAMARD, ("1", "G2@1"), g, ScriptedRng([0.75]))
    assert res.outcome_label == "G2@1"
    assert res.branch_probability == pytest.approx(0.5)
    expected = (basis_target(g, "10") - basis_target(g, "11")) * SQ2
    assert np.allclose(res.post_state.target_vector(), expected, atol=1e-12)

    res = lift_step(s, HADAMARD, HADAMARD, ("1", "G2@1"), g, ScriptedRng([0.25]))
    assert res.outcome_label == "1"
    assert res.branch_probability == pytest.approx(0.5)
    expected = (basis_target(g, "10") + basis_target(g, "11")) * SQ2
    assert np.allclose(res.post_state.target_vector(), expected, atol=1e-12)


def test_conditional_operator_hadamard_case():
    g = build_parity_gateset(1)
    half = 0.5
    eye, g2 = g.gate("1").matrix(), g.gate("G2@1").matrix()
    o_same = conditional_operator(HADAMARD, HADAMARD, ("1", "G2@1"), g, "1")
    o_flip = conditional_operator(HADAMARD, HADAMARD, ("1", "G2@1"), g, "G2@1")
    assert np.allclose(o_same, half * (eye + g2), atol=1e-12)
    assert np.allclose(o_flip, half * (eye - g2), atol=1e-12)
    off = conditional_operator(HADAMARD, HADAMARD, ("1", "G2@1"), g, "G1@1")
    assert np.all(off == 0)


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_lift_step_matches_conditional_operator(seed):
    rng = np.random.default_rng(seed)
    g = build_parity_gateset(2)
    labels = g.labels
    subspace = tuple(rng.choice(len(labels), size=2, replace=False))
    subspace = (labels[subspace[0]], labels[subspace[1]])
    u_a = random_unitary(2, rng)
    u_b = random_unitary(2, rng)
    psi = random_state(g.target_dim, rng)
    s = joint_state(g, subspace[0], psi)
    res = lift_step(s, u_a, u_b, subspace, g, make_rng(seed))
    op = conditional_operator(u_a, u_b, subspace, g, res.outcome_label)
    v = op @ psi
    p = float(np.vdot(v, v).real)
    assert res.branch_probability == pytest.approx(p, abs=1e-10)
    idx = label_to_index(res.outcome_label, g.control_dim)
    assert np.allclose(
        res.post_state.table()[idx], v / np.sqrt(p), atol=1e-10
    )


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_conditional_operators_resolve_identity(seed):
    """Branch operators over the subspace satisfy sum_j O_j^dag O_j = 1."""
    rng = np.random.default_rng(seed)
    g = build_parity_gateset(1)
    subspace = ("1", "G2@1")
    u_a = random_unitary(2, rng)
    u_b = random_unitary(2, rng)
    total = np.zeros((g.target_dim, g.target_dim), dtype=complex)
    for lbl in subspace:
        op = conditional_operator(u_a, u_b, subspace, g, lbl)
        total += op.conj().T @ op
    assert np.allclose(total, np.eye(g.target_dim), atol=1e-12)


def test_pair_labels():
    assert pair_labels(1) == ("G1@1", "G2@1")
    assert pair_labels(3) == ("G1@3", "G2@3")
