"""Control-target model: classical gate sets on the target register, the
coherent controlled interaction, and one probabilistic lift step.

The control register is a (2n+1)-dimensional system whose basis states index
the available classical gates. Basis ordering is fixed package-wide:
index 0 is the identity (label ``"1"``), index 2l-1 is ``"G1@l"`` and
index 2l is ``"G2@l"`` for pair l = 1..n.

Classical gates are stored as index permutations (``perm[x]`` is the image
basis index of ``|x>``); dense matrices are materialized on demand so large
target dimensions stay cheap.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionError,
    HADAMARD,
    MAX_DIM,
    NORM_ATOL,
    as_matrix,
    check_normalized,
    is_unitary,
    sample_index,
)

IDENTITY_LABEL = "1"


def pair_labels(pair: int) -> tuple[str, str]:
    return f"G1@{pair}", f"G2@{pair}"


def label_to_index(label: str, control_dim: int) -> int:
    if label == IDENTITY_LABEL:
        return 0
    try:
        kind, pair_s = label.split("@")
        pair = int(pair_s)
        i = {"G1": 1, "G2": 2}[kind]
    except (ValueError, KeyError) as exc:
        raise ValueError(f"unknown control label {label!r}") from exc
    idx = 2 * pair - 2 + i
    if not (1 <= pair and idx < control_dim):
        raise ValueError(f"control label {label!r} out of range (dim {control_dim})")
    return idx


def index_to_label(idx: int) -> str:
    if idx == 0:
        return IDENTITY_LABEL
    pair, i = divmod(idx - 1, 2)
    return f"G{i + 1}@{pair + 1}"


@dataclass(frozen=True)
class ClassicalGate:
    """A reversible classical gate, stored as a basis permutation."""

    label: str
    perm: np.ndarray  # perm[x] = index of G|x>

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        object.__setattr__(self, "perm", perm)
        if sorted(perm.tolist()) != list(range(perm.size)):
            raise ValueError(f"gate {self.label!r}: not a permutation")

    @property
    def dim(self) -> int:
        return int(self.perm.size)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        m[self.perm, np.arange(self.dim)] = 1.0
        return m

    def apply(self, target: np.ndarray) -> np.ndarray:
        out = np.empty_like(target)
        out[self.perm] = target
        return out


@dataclass(frozen=True)
class ControlBasis:
    """Bijection between control labels and control basis indices."""

    dim: int

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(index_to_label(i) for i in range(self.dim))

    def index_of(self, label: str) -> int:
        return label_to_index(label, self.dim)


@dataclass(frozen=True)
class ClassicalGateSet:
    """Identity plus the pair-local gates {G1, G2} for each target pair."""

    gates: tuple[ClassicalGate, ...]
    target_dim: int
    n_pairs: int
    qubits_per_pair: int

    def __post_init__(self):
        if len(self.gates) != 2 * self.n_pairs + 1:
            raise ValueError("gate count must be 2*n_pairs + 1")
        if self.gates[0].label != IDENTITY_LABEL:
            raise ValueError('gates[0] must be the identity, labelled "1"')
        for i, g in enumerate(self.gates):
            if g.label != index_to_label(i):
                raise ValueError(f"gate {i} has label {g.label!r}, expected {index_to_label(i)!r}")
            if g.dim != self.target_dim:
                raise ValueError(f"gate {g.label!r} has dim {g.dim} != {self.target_dim}")

    @property
    def control_dim(self) -> int:
        return len(self.gates)

    @property
    def basis(self) -> ControlBasis:
        return ControlBasis(self.control_dim)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(g.label for g in self.gates)

    def gate(self, label: str) -> ClassicalGate:
        return self.gates[label_to_index(label, self.control_dim)]


def _identity_gate(dim: int) -> ClassicalGate:
    return ClassicalGate(IDENTITY_LABEL, np.arange(dim))


def _bit_shift(qubit: int, total_qubits: int) -> int:
    # qubit is 1-indexed with qubit 1 the most significant bit
    return total_qubits - qubit


def build_parity_gateset(n: int, max_dim: int = MAX_DIM) -> ClassicalGateSet:
    """NOT/CNOT gates local to each of n target qubit pairs.

    Pair l occupies physical qubits (2l-1, 2l); G1 is NOT on qubit 2l-1 and
    G2 is CNOT with control 2l-1 and target 2l.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    nq = 2 * n
    dim = 1 << nq
    if dim > max_dim:
        raise DimensionError(f"target dimension 2^{nq} exceeds maximum {max_dim}")
    x = np.arange(dim)
    gates = [_identity_gate(dim)]
    for pair in range(1, n + 1):
        hi = 1 << _bit_shift(2 * pair - 1, nq)
        lo = 1 << _bit_shift(2 * pair, nq)
        g1, g2 = pair_labels(pair)
        gates.append(ClassicalGate(g1, x ^ hi))
        gates.append(ClassicalGate(g2, np.where(x & hi != 0, x ^ lo, x)))
    return ClassicalGateSet(tuple(gates), dim, n, qubits_per_pair=2)


def _swap_bits(x: np.ndarray, a: int, b: int) -> np.ndarray:
    ba = (x >> a) & 1
    bb = (x >> b) & 1
    diff = ba ^ bb
    return x ^ (diff << a) ^ (diff << b)


def build_swap_gateset(n: int, max_dim: int = MAX_DIM) -> ClassicalGateSet:
    """SWAP-only realization: block l occupies 4 physical qubits.

    G1 = SWAP13 * SWAP24 and G2 = SWAP12 within the block.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    nq = 4 * n
    dim = 1 << nq
    if dim > max_dim:
        raise DimensionError(f"target dimension 2^{nq} exceeds maximum {max_dim}")
    x = np.arange(dim)
    gates = [_identity_gate(dim)]
    for pair in range(1, n + 1):
        q = [_bit_shift(4 * (pair - 1) + j, nq) for j in range(1, 5)]
        g1, g2 = pair_labels(pair)
        gates.append(ClassicalGate(g1, _swap_bits(_swap_bits(x, q[0], q[2]), q[1], q[3])))
        gates.append(ClassicalGate(g2, _swap_bits(x, q[0], q[1])))
    return ClassicalGateSet(tuple(gates), dim, n, qubits_per_pair=4)


@dataclass(frozen=True)
class JointState:
    """Normalized amplitudes over (control basis) x (target basis)."""

    amplitudes: np.ndarray
    control_dim: int
    target_dim: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != self.control_dim * self.target_dim:
            raise DimensionError(
                f"amplitude length {amps.size} != {self.control_dim}*{self.target_dim}"
            )
        check_normalized(amps)

    @property
    def n_pairs(self) -> int:
        return (self.control_dim - 1) // 2

    @property
    def qubits_per_pair(self) -> int:
        nq = int(self.target_dim).bit_length() - 1
        return nq // self.n_pairs

    def table(self) -> np.ndarray:
        """(control_dim, target_dim) view of the amplitudes."""
        return self.amplitudes.reshape(self.control_dim, self.target_dim)

    def control_support(self) -> np.ndarray:
        """Indices of control basis states carrying nonzero weight."""
        weights = np.abs(self.table()) ** 2
        return np.flatnonzero(weights.sum(axis=1) > NORM_ATOL)

    def target_vector(self) -> np.ndarray:
        """Target state when the control is in a single basis state."""
        support = self.control_support()
        if support.size != 1:
            raise ValueError("control register is not in a basis state")
        row = self.table()[support[0]]
        return row / np.linalg.norm(row)


def joint_state(g: ClassicalGateSet, control_label: str, target) -> JointState:
    """|control_label> (x) |target>."""
    tvec = check_normalized(np.asarray(target, dtype=complex).reshape(-1))
    if tvec.size != g.target_dim:
        raise DimensionError(f"target dim {tvec.size} != gateset dim {g.target_dim}")
    amps = np.zeros((g.control_dim, g.target_dim), dtype=complex)
    amps[label_to_index(control_label, g.control_dim)] = tvec
    return JointState(amps.reshape(-1), g.control_dim, g.target_dim)


def basis_target(g: ClassicalGateSet, bits: str) -> np.ndarray:
    """Classical target basis state from a bit string, qubit 1 first."""
    nq = g.n_pairs * g.qubits_per_pair
    if len(bits) != nq or set(bits) - {"0", "1"}:
        raise ValueError(f"expected {nq} bits, got {bits!r}")
    vec = np.zeros(g.target_dim, dtype=complex)
    vec[int(bits, 2)] = 1.0
    return vec


@dataclass(frozen=True)
class LiftStepResult:
    outcome_label: str
    post_state: JointState
    branch_probability: float


def controlled_apply(s: JointState, g: ClassicalGateSet) -> JointState:
    """Map each block |G_i> (x) |psi> to |G_i> (x) G_i|psi>."""
    if s.control_dim != g.control_dim or s.target_dim != g.target_dim:
        raise DimensionError("joint state and gate set dimensions do not match")
    table = s.table()
    out = np.empty_like(table)
    for i, gate in enumerate(g.gates):
        out[i, gate.perm] = table[i]
    return JointState(out.reshape(-1), s.control_dim, s.target_dim)


def apply_classical_gate(s: JointState, g: ClassicalGateSet, label: str) -> JointState:
    """Apply one classical gate to the target unconditionally (free primitive)."""
    gate = g.gate(label)
    table = s.table()
    out = np.empty_like(table)
    out[:, gate.perm] = table
    return JointState(out.reshape(-1), s.control_dim, s.target_dim)


def _embed_control_unitary(u: np.ndarray, indices: list[int], control_dim: int) -> np.ndarray:
    full = np.eye(control_dim, dtype=complex)
    full[np.ix_(indices, indices)] = u
    return full


def control_unitary(s: JointState, u, subspace) -> JointState:
    """Apply a unitary within the span of the named control basis states."""
    u = as_matrix(u)
    indices = [label_to_index(lbl, s.control_dim) for lbl in subspace]
    if len(set(indices)) != len(indices):
        raise ValueError("subspace labels must be distinct")
    if u.shape != (len(indices), len(indices)):
        raise DimensionError(f"unitary shape {u.shape} != subspace size {len(indices)}")
    if not is_unitary(u):
        raise ValueError("control operator is not unitary within tolerance")
    table = s.table().copy()
    table[indices] = u @ table[indices]
    return JointState(table.reshape(-1), s.control_dim, s.target_dim)


def relabel_control(s: JointState, from_pair: int, to_pair: int) -> JointState:
    """Swap |G_i@from> <-> |G_i@to> for i = 1,2; identity elsewhere."""
    n = s.n_pairs
    if not (1 <= from_pair <= n and 1 <= to_pair <= n):
        raise ValueError(f"pair index out of range 1..{n}")
    table = s.table().copy()
    if from_pair != to_pair:
        for i in (1, 2):
            a = 2 * from_pair - 2 + i
            b = 2 * to_pair - 2 + i
            table[[a, b]] = table[[b, a]]
    return JointState(table.reshape(-1), s.control_dim, s.target_dim)


def reset_control(s: JointState, label: str) -> JointState:
    """Move a basis-state control register to the named basis state (free)."""
    target_idx = label_to_index(label, s.control_dim)
    support = s.control_support()
    if support.size != 1:
        raise ValueError("cannot reset: control register is not in a basis state")
    src = int(support[0])
    if src == target_idx:
        return s
    table = s.table().copy()
    table[[src, target_idx]] = table[[target_idx, src]]
    return JointState(table.reshape(-1), s.control_dim, s.target_dim)


def measure_control(s: JointState, rng) -> tuple[str, JointState, float]:
    """Projective measurement of the control register in its basis."""
    table = s.table()
    probs = (np.abs(table) ** 2).sum(axis=1)
    k = sample_index(probs, rng)
    p = float(probs[k])
    if p <= 0.0:
        raise RuntimeError("sampled a zero-probability control outcome")  # defensive
    post = np.zeros_like(table)
    post[k] = table[k] / np.sqrt(p)
    return index_to_label(k), JointState(post.reshape(-1), s.control_dim, s.target_dim), p


def _pair_bit_codes(s: JointState, pair: int) -> np.ndarray:
    """Per-target-index code of the measured pair's qubits, first qubit as MSB."""
    qpp = s.qubits_per_pair
    nq = s.n_pairs * qpp
    if not (1 <= pair <= s.n_pairs):
        raise ValueError(f"pair index out of range 1..{s.n_pairs}")
    idx = np.arange(s.target_dim)
    codes = np.zeros(s.target_dim, dtype=np.int64)
    for j in range(qpp):
        qubit = (pair - 1) * qpp + j + 1
        codes = (codes << 1) | ((idx >> _bit_shift(qubit, nq)) & 1)
    return codes


def measure_target_classical(
    s: JointState, pair: int, rng
) -> tuple[str, JointState, float]:
    """Classical-basis measurement of one pair's physical qubits.

    Returns the measured bits (as a string, first physical qubit first), the
    collapsed renormalized state, and the outcome probability.
    """
    qpp = s.qubits_per_pair
    codes = _pair_bit_codes(s, pair)
    table = s.table()
    weights = (np.abs(table) ** 2).sum(axis=0)
    probs = np.bincount(codes, weights=weights, minlength=1 << qpp)
    k = sample_index(probs, rng)
    p = float(probs[k])
    if p <= 0.0:
        raise RuntimeError("sampled a zero-probability classical outcome")  # defensive
    post = table.copy()
    post[:, codes != k] = 0.0
    post /= np.sqrt(p)
    bits = format(k, f"0{qpp}b")
    return bits, JointState(post.reshape(-1), s.control_dim, s.target_dim), p


def lift_step(
    s: JointState, u_a, u_b, subspace, g: ClassicalGateSet, rng
) -> LiftStepResult:
    """One round of the general scheme: U_a, controlled interaction, U_b,
    control measurement."""
    state = control_unitary(s, u_a, subspace)
    state = controlled_apply(state, g)
    state = control_unitary(state, u_b, subspace)
    label, post, prob = measure_control(state, rng)
    return LiftStepResult(label, post, prob)


def conditional_operator(u_a, u_b, subspace, g: ClassicalGateSet, outcome_label: str) -> np.ndarray:
    """Target operator implemented on a given control outcome, built directly
    from the measurement-free matrix arithmetic: O_j = sum_i u_b[j,i] u_a[i,0] G_i.

    The control is assumed to start in the first subspace label. Serves as the
    independent oracle for ``lift_step``.
    """
    u_a, u_b = as_matrix(u_a), as_matrix(u_b)
    labels = list(subspace)
    if outcome_label not in labels:
        return np.zeros((g.target_dim, g.target_dim), dtype=complex)
    j = labels.index(outcome_label)
    op = np.zeros((g.target_dim, g.target_dim), dtype=complex)
    for i, lbl in enumerate(labels):
        coeff = u_b[j, i] * u_a[i, 0]
        if coeff != 0:
            op += coeff * g.gate(lbl).matrix()
    return op


def hadamard_2() -> np.ndarray:
    return HADAMARD.copy()
