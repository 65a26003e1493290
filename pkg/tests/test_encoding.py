import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftedqc.linalg import DimensionError, PAULI_X, PAULI_Y, PAULI_Z, kron
from liftedqc.encoding import (
    LogicalEncoding,
    PAIR_ISOMETRIES,
    encode,
    gate_leakage,
    project_logical,
    restricted_operator,
    verify_pauli_action,
)
from liftedqc.lift import basis_target, build_parity_gateset, build_swap_gateset

from conftest import random_state

SQ2 = 1.0 / np.sqrt(2.0)

BUILDERS = {"parity": build_parity_gateset, "swap": build_swap_gateset}


def test_parity_codewords():
    enc = LogicalEncoding.build("parity", 1)
    # |0>_L = (|10> - |11>)/sqrt(2), |1>_L = (|00> - |01>)/sqrt(2)
    zero = encode(enc, [1, 0])
    one = encode(enc, [0, 1])
    assert np.allclose(zero, SQ2 * np.array([0, 0, 1, -1]), atol=1e-15)
    assert np.allclose(one, SQ2 * np.array([1, -1, 0, 0]), atol=1e-15)


def test_swap_codewords():
    enc = LogicalEncoding.build("swap", 1)
    zero = encode(enc, [1, 0])
    one = encode(enc, [0, 1])
    # |0>_L = (|1000> - |0100>)/sqrt(2), |1>_L = (|0010> - |0001>)/sqrt(2)
    expected_zero = np.zeros(16)
    expected_zero[0b1000] = SQ2
    expected_zero[0b0100] = -SQ2
    expected_one = np.zeros(16)
    expected_one[0b0010] = SQ2
    expected_one[0b0001] = -SQ2
    assert np.allclose(zero, expected_zero, atol=1e-15)
    assert np.allclose(one, expected_one, atol=1e-15)


@pytest.mark.parametrize("variant", ["parity", "swap"])
def test_isometry_columns_orthonormal(variant):
    block = PAIR_ISOMETRIES[variant]
    gram = block.conj().T @ block
    assert np.allclose(gram, np.eye(2), atol=1e-15)


@pytest.mark.parametrize("variant,n", [("parity", 1), ("parity", 3), ("swap", 2)])
def test_multi_qubit_isometry_shape_and_orthonormality(variant, n):
    enc = LogicalEncoding.build(variant, n)
    assert enc.logical_dim == 1 << n
    gram = enc.isometry.conj().T @ enc.isometry
    assert np.allclose(gram, np.eye(1 << n), atol=1e-12)


def test_multi_qubit_encoding_is_tensor_product():
    enc1 = LogicalEncoding.build("parity", 1)
    enc2 = LogicalEncoding.build("parity", 2)
    a = encode(enc1, [1, 0])
    b = encode(enc1, [0, 1])
    assert np.allclose(encode(enc2, [0, 1, 0, 0]), np.kron(a, b), atol=1e-14)


def test_build_validation():
    with pytest.raises(ValueError):
        LogicalEncoding.build("nonsense", 1)
    with pytest.raises(ValueError):
        LogicalEncoding.build("parity", 0)
    bad = PAIR_ISOMETRIES["parity"].copy()
    bad[:, 1] = bad[:, 0]
    with pytest.raises(ValueError):
        LogicalEncoding("parity", 1, bad)


def test_encode_dimension_check():
    enc = LogicalEncoding.build("parity", 1)
    with pytest.raises(DimensionError):
        encode(enc, [1, 0, 0, 0])


def test_leakage_of_classical_pair_state_is_half():
    enc = LogicalEncoding.build("parity", 1)
    g = build_parity_gateset(1)
    logical, leakage = project_logical(enc, basis_target(g, "10"))
    assert leakage == pytest.approx(0.5, abs=1e-15)
    # the in-subspace component is |0>_L
    assert abs(abs(logical[0]) - 1.0) <= 1e-12


def test_leakage_of_fully_leaked_state():
    enc = LogicalEncoding.build("swap", 1)
    physical = np.zeros(16, dtype=complex)
    physical[0b1100] = 1.0  # two excitations: outside the code space
    comp, leakage = project_logical(enc, physical)
    assert leakage == pytest.approx(1.0)
    assert np.all(comp == 0)


@given(seed=st.integers(min_value=0, max_value=2**32 - 1),
       variant=st.sampled_from(["parity", "swap"]))
@settings(max_examples=40, deadline=None)
def test_encode_project_round_trip(seed, variant):
    rng = np.random.default_rng(seed)
    enc = LogicalEncoding.build(variant, 2)
    psi = random_state(4, rng)
    logical, leakage = project_logical(enc, encode(enc, psi))
    assert leakage <= 1e-12
    assert abs(abs(np.vdot(logical, psi)) - 1.0) <= 1e-12


@pytest.mark.parametrize("variant,n", [("parity", 1), ("parity", 2), ("swap", 1), ("swap", 2)])
def test_restricted_gate_action(variant, n):
    enc = LogicalEncoding.build(variant, n)
    g = BUILDERS[variant](n)
    for pair in range(1, n + 1):
        ops_x = [np.eye(2, dtype=complex)] * n
        ops_x[pair - 1] = PAULI_X
        ops_z = [np.eye(2, dtype=complex)] * n
        ops_z[pair - 1] = -PAULI_Z
        expected_x = ops_x[0]
        expected_z = ops_z[0]
        for ox, oz in zip(ops_x[1:], ops_z[1:]):
            expected_x = kron(expected_x, ox)
            expected_z = kron(expected_z, oz)
        assert np.allclose(restricted_operator(enc, g, f"G1@{pair}"), expected_x, atol=1e-12)
        assert np.allclose(restricted_operator(enc, g, f"G2@{pair}"), expected_z, atol=1e-12)


@pytest.mark.parametrize("variant", ["parity", "swap"])
def test_g2_g1_composite_is_minus_i_y(variant):
    enc = LogicalEncoding.build(variant, 1)
    g = BUILDERS[variant](1)
    prod = restricted_operator(enc, g, "G2@1") @ restricted_operator(enc, g, "G1@1")
    assert np.allclose(prod, -1j * PAULI_Y, atol=1e-12)


@pytest.mark.parametrize("variant,n", [("parity", 1), ("parity", 2), ("swap", 1), ("swap", 2)])
def test_verify_pauli_action_passes(variant, n):
    report = verify_pauli_action(LogicalEncoding.build(variant, n), BUILDERS[variant](n))
    assert report.passed
    assert len(report.checks) == 2 * n
    assert all(c.max_error <= 1e-12 for c in report.checks)


def test_verify_pauli_action_reports_mismatch():
    report = verify_pauli_action(LogicalEncoding.build("parity", 1), build_swap_gateset(1))
    assert not report.passed
    assert "mismatch" in report.checks[0].note


@pytest.mark.parametrize("variant,n", [("parity", 2), ("swap", 1)])
def test_gates_preserve_logical_subspace(variant, n):
    enc = LogicalEncoding.build(variant, n)
    g = BUILDERS[variant](n)
    for label in g.labels:
        assert gate_leakage(enc, g, label) <= 1e-12
