"""Dense complex linear algebra: tensor products, unitary application,
projective measurement sampling, and phase-insensitive state comparison.

Everything operates on plain ``complex128`` numpy arrays. Tolerances are
fixed package-wide: 1e-12 for normalization, 1e-10 for unitarity and
subspace checks (double-precision headroom). Permutation-matrix checks
are exact.
"""
from __future__ import annotations

import numpy as np

NORM_ATOL = 1e-12
UNITARY_ATOL = 1e-10
PHASE_ATOL = 1e-9
MAX_DIM = 1 << 16

_MASK64 = (1 << 64) - 1


class DimensionError(ValueError):
    """Operand dimensions are inconsistent or exceed the configured maximum."""


# --- standard single- and two-qubit gate constants ---------------------------

_SQ2 = 1.0 / np.sqrt(2.0)

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = _SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)
# "wrong branch" companion of H generated by the repeat-until-success loop
HADAMARD_TILDE = _SQ2 * (PAULI_X - PAULI_Z)
T_GATE = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
CZ_GATE = np.diag([1, 1, 1, -1]).astype(complex)
# (1x1 + Zx1 - 1xZ + ZxZ)/2, the failure-branch companion of CZ
CZ_TILDE = np.diag([1, 1, -1, 1]).astype(complex)
CNOT_GATE = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def as_state(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    if v.size == 0:
        raise DimensionError("state vector must be non-empty")
    return v


def as_matrix(mat) -> np.ndarray:
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={m.ndim}")
    return m


def check_normalized(vec, atol: float = NORM_ATOL) -> np.ndarray:
    v = as_state(vec)
    nrm2 = float(np.vdot(v, v).real)
    if abs(nrm2 - 1.0) > atol:
        raise ValueError(f"state is not normalized: |psi|^2 = {nrm2!r}")
    return v


def is_unitary(mat, atol: float = UNITARY_ATOL) -> bool:
    m = as_matrix(mat)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


def is_permutation(mat) -> bool:
    """Exact permutation-matrix check: one entry equal to 1 per row/column."""
    m = as_matrix(mat)
    if m.shape[0] != m.shape[1]:
        return False
    ones = m == 1
    zeros = m == 0
    if not np.all(ones | zeros):
        return False
    return bool(np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1))


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Tensor product with a guard against runaway dimensions."""
    a, b = as_matrix(a), as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise DimensionError(
            f"kron result {rows}x{cols} exceeds configured maximum {max_dim}"
        )
    return np.kron(a, b)


def apply_unitary(state, u) -> np.ndarray:
    v = as_state(state)
    m = as_matrix(u)
    if m.shape[0] != m.shape[1] or m.shape[1] != v.size:
        raise DimensionError(f"cannot apply {m.shape} matrix to dim-{v.size} state")
    if not is_unitary(m):
        raise ValueError("matrix is not unitary within tolerance")
    return m @ v


def measure_projective(state, projectors, rng):
    """Sample a projective measurement outcome via the Born rule.

    Returns (outcome index, renormalized post-state, outcome probability).
    The projector set must be complete (sum to identity within 1e-10).
    """
    v = check_normalized(state)
    projs = [as_matrix(p) for p in projectors]
    if not projs:
        raise ValueError("empty projector set")
    total = sum(projs)
    if np.max(np.abs(total - np.eye(v.size))) > UNITARY_ATOL:
        raise ValueError("projectors do not sum to identity within tolerance")
    branches = [p @ v for p in projs]
    probs = np.array([float(np.vdot(b, b).real) for b in branches])
    k = sample_index(probs, rng)
    if probs[k] <= 0.0:
        raise RuntimeError("sampled a zero-probability branch")  # defensive
    post = branches[k] / np.sqrt(probs[k])
    return k, post, float(probs[k])


def sample_index(probs: np.ndarray, rng) -> int:
    """Draw an index from a probability vector with a single uniform variate.

    Uses a fixed cumulative-sum rule so that replays with the same generator
    state reproduce outcomes bit-for-bit.
    """
    p = np.asarray(probs, dtype=float)
    if p.min() < -UNITARY_ATOL or abs(p.sum() - 1.0) > UNITARY_ATOL:
        raise ValueError(f"invalid probability vector (sum={p.sum()!r})")
    u = rng.random()
    k = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(k, p.size - 1)


def fidelity_up_to_phase(a, b) -> float:
    """|<a|b>| for normalized states of equal dimension."""
    va, vb = check_normalized(a), check_normalized(b)
    if va.size != vb.size:
        raise DimensionError(f"dimension mismatch: {va.size} vs {vb.size}")
    return float(abs(np.vdot(va, vb)))


def canonical_phase(mat, tol: float = PHASE_ATOL) -> np.ndarray:
    """Rescale a matrix so its first nonzero entry (row-major) is real positive.

    Shared phase-canonicalization rule used for all "equal up to a global
    phase" group bookkeeping.
    """
    m = as_matrix(mat)
    flat = m.reshape(-1)
    idx = np.flatnonzero(np.abs(flat) > tol)
    if idx.size == 0:
        return m.copy()
    pivot = flat[idx[0]]
    return m * (abs(pivot) / pivot)


# --- reproducible RNG streams -------------------------------------------------

def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator from a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def derive_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial stream: seed XOR a splitmix64 hash of the index."""
    return make_rng((seed & _MASK64) ^ _splitmix64(trial & _MASK64))
