"""Logical qubit encodings into physical target pairs/blocks.

The parity variant encodes one logical qubit per pair of physical qubits:
|0>_L = (|10> - |11>)/sqrt(2), |1>_L = (|00> - |01>)/sqrt(2). The SWAP
variant uses four-qubit blocks: |0>_L = (|1000> - |0100>)/sqrt(2),
|1>_L = (|0010> - |0001>)/sqrt(2). On the encoded subspace G1 acts as X
and G2 as -Z in both variants.

Multi-qubit isometries are tensor products of the per-pair isometry in pair
order 1..n (logical qubit 1 is the most significant logical factor).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .linalg import (
    DimensionError,
    NORM_ATOL,
    PAULI_X,
    PAULI_Z,
    check_normalized,
    kron,
)
from .lift import ClassicalGateSet, pair_labels

_SQ2 = 1.0 / np.sqrt(2.0)

PAIR_ISOMETRIES = {
    # columns: encoded |0>_L, |1>_L
    "parity": _SQ2 * np.array(
        [[0, 1], [0, -1], [1, 0], [-1, 0]], dtype=complex
    ),
    "swap": _SQ2 * np.array(
        [
            [0, 0], [0, -1], [0, 1], [0, 0],
            [-1, 0], [0, 0], [0, 0], [0, 0],
            [1, 0], [0, 0], [0, 0], [0, 0],
            [0, 0], [0, 0], [0, 0], [0, 0],
        ],
        dtype=complex,
    ),
}

VARIANT_QUBITS_PER_PAIR = {"parity": 2, "swap": 4}


@dataclass(frozen=True)
class LogicalEncoding:
    """Isometry from n logical qubits into the physical target space."""

    variant: str
    n: int
    isometry: np.ndarray  # (physical_dim, 2**n), orthonormal columns

    def __post_init__(self):
        iso = np.asarray(self.isometry, dtype=complex)
        object.__setattr__(self, "isometry", iso)
        expected = 1 << (VARIANT_QUBITS_PER_PAIR[self.variant] * self.n)
        if iso.shape != (expected, 1 << self.n):
            raise DimensionError(
                f"isometry shape {iso.shape} != ({expected}, {1 << self.n})"
            )
        gram = iso.conj().T @ iso
        if np.max(np.abs(gram - np.eye(1 << self.n))) > NORM_ATOL * (1 << self.n):
            raise ValueError("isometry columns are not orthonormal")

    @property
    def physical_dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def logical_dim(self) -> int:
        return self.isometry.shape[1]

    @classmethod
    def build(cls, variant: str, n: int) -> "LogicalEncoding":
        if variant not in PAIR_ISOMETRIES:
            raise ValueError(f"unknown encoding variant {variant!r}")
        if n < 1:
            raise ValueError("n must be >= 1")
        block = PAIR_ISOMETRIES[variant]
        iso = reduce(kron, [block] * n)
        return cls(variant, n, iso)


def encode(enc: LogicalEncoding, logical) -> np.ndarray:
    v = check_normalized(logical)
    if v.size != enc.logical_dim:
        raise DimensionError(f"logical dim {v.size} != {enc.logical_dim}")
    return enc.isometry @ v


def project_logical(enc: LogicalEncoding, physical) -> tuple[np.ndarray, float]:
    """Project onto the logical subspace.

    Returns the renormalized logical component and the leakage
    1 - ||P_logical psi||^2.
    """
    v = np.asarray(physical, dtype=complex).reshape(-1)
    if v.size != enc.physical_dim:
        raise DimensionError(f"physical dim {v.size} != {enc.physical_dim}")
    comp = enc.isometry.conj().T @ v
    weight = float(np.vdot(comp, comp).real)
    leakage = max(0.0, 1.0 - weight)
    if weight > 0.0:
        comp = comp / np.sqrt(weight)
    return comp, leakage


def _logical_single_qubit_op(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    factors = [np.eye(2, dtype=complex)] * n
    factors[qubit - 1] = op
    return reduce(kron, factors)


@dataclass(frozen=True)
class PauliCheck:
    gate_label: str
    expected: str
    passed: bool
    max_error: float
    note: str = ""


@dataclass(frozen=True)
class PauliActionReport:
    checks: tuple[PauliCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def restricted_operator(enc: LogicalEncoding, g: ClassicalGateSet, label: str) -> np.ndarray:
    """V^dag G V on the logical space, using the gate's permutation directly."""
    gate = g.gate(label)
    gv = np.empty_like(enc.isometry)
    gv[gate.perm] = enc.isometry
    return enc.isometry.conj().T @ gv


def verify_pauli_action(enc: LogicalEncoding, g: ClassicalGateSet) -> PauliActionReport:
    """Check that on the encoded subspace each G1 acts as X and each G2 as -Z
    on its logical qubit (entrywise, within 1e-12). Returns a report rather
    than raising, so mismatched pairings produce failure entries.
    """
    if enc.physical_dim != g.target_dim or enc.n != g.n_pairs:
        note = (
            f"dimension mismatch: encoding ({enc.variant}, n={enc.n}, "
            f"dim {enc.physical_dim}) vs gateset (dim {g.target_dim}, "
            f"{g.n_pairs} pairs)"
        )
        return PauliActionReport((PauliCheck("*", "*", False, float("inf"), note),))
    checks = []
    for pair in range(1, g.n_pairs + 1):
        g1, g2 = pair_labels(pair)
        for label, op, name in (
            (g1, _logical_single_qubit_op(PAULI_X, pair, enc.n), "X"),
            (g2, _logical_single_qubit_op(-PAULI_Z, pair, enc.n), "-Z"),
        ):
            reduced = restricted_operator(enc, g, label)
            err = float(np.max(np.abs(reduced - op)))
            checks.append(PauliCheck(label, name, err <= 1e-12, err))
    return PauliActionReport(tuple(checks))


def gate_leakage(enc: LogicalEncoding, g: ClassicalGateSet, label: str) -> float:
    """Worst leakage of G applied to the encoded computational basis."""
    gate = g.gate(label)
    worst = 0.0
    for col in range(enc.logical_dim):
        physical = np.zeros(enc.physical_dim, dtype=complex)
        physical[gate.perm] = enc.isometry[:, col]
        _, leak = project_logical(enc, physical)
        worst = max(worst, leak)
    return worst
