"""Closed-form success probabilities, the restricted random-walk oracle for
the T protocol, finite-group enumeration, and a Monte Carlo harness.

The Monte Carlo harness has two interchangeable engines: a vectorized one
that evolves all trials' joint state vectors in a single batch (used for
large trial counts), and a scalar one that drives the actual protocol
functions with one derived RNG stream per trial. Both sample measurement
outcomes from the simulated amplitudes, so neither assumes the closed forms
it is used to check.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .linalg import (
    CZ_GATE,
    CZ_TILDE,
    HADAMARD,
    HADAMARD_TILDE,
    T_GATE,
    canonical_phase,
    derive_rng,
    kron,
    make_rng,
)
from .lift import build_parity_gateset, joint_state, label_to_index
from .encoding import LogicalEncoding, encode
from .protocols import (
    GCNOT_REPRESENTATIVES,
    GH_REPRESENTATIVES,
    RusConfig,
    initialize_pair,
    rus_cz,
    rus_hadamard,
    rus_t,
)

# restricted walk matrix over points {T^0, T^7, T^6}
M_Q = 0.5 * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)

PROTOCOLS = ("init", "H", "T", "CZ")


def success_prob_init(m: int) -> float:
    """Probability that initialization succeeds within m iterations."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return 1.0 - 0.5**m


def success_prob_gate(m: int) -> float:
    """Probability that an H/T/CZ protocol succeeds within m iterations."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return 1.0 - 0.5 ** math.ceil(m / 2)


def walk_absorption_prob(k: int) -> float:
    """Probability of first reaching T^1 or T^5 exactly at step k, from the
    powers of the restricted walk matrix: P(k) = (P_0(k-1) + P_6(k-1))/2."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 0.0
    power = np.linalg.matrix_power(M_Q, k - 1)
    # basis order (e0, e7, e6); the walk starts at T^0
    return 0.5 * float(power[0, 0] + power[2, 0])


def enumerate_group(generators, max_elements: int = 10_000, atol: float = 1e-9):
    """Closure of the generators under multiplication, modulo global phase.

    Returns the phase-canonical representatives. Raises if the closure
    exceeds max_elements (non-finite set or tolerance failure).
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    dim = gens[0].shape[0]
    elements = [canonical_phase(np.eye(dim, dtype=complex))]

    def find(m):
        for el in elements:
            if np.max(np.abs(el - m)) <= atol:
                return True
        return False

    frontier = [elements[0]]
    while frontier:
        new_frontier = []
        for el in frontier:
            for gen in gens:
                prod = canonical_phase(gen @ el)
                if not find(prod):
                    elements.append(prod)
                    new_frontier.append(prod)
                    if len(elements) > max_elements:
                        raise RuntimeError(
                            f"group closure exceeded {max_elements} elements"
                        )
        frontier = new_frontier
    return elements


# --- Monte Carlo harness ---------------------------------------------------------

# fixed generic logical inputs; success statistics are input-independent
_PSI_1Q = np.array([math.cos(0.55), math.sin(0.55) * np.exp(0.9j)], dtype=complex)
_PHI_1Q = np.array([math.cos(1.1), math.sin(1.1) * np.exp(-0.4j)], dtype=complex)


def _control_unitary_matrix(u2: np.ndarray, indices, cdim: int) -> np.ndarray:
    full = np.eye(cdim, dtype=complex)
    full[np.ix_(list(indices), list(indices))] = u2
    return full


def _interaction_matrix(g) -> np.ndarray:
    blocks = [gate.matrix() for gate in g.gates]
    out = np.zeros((g.control_dim * g.target_dim,) * 2, dtype=complex)
    t = g.target_dim
    for i, b in enumerate(blocks):
        out[i * t : (i + 1) * t, i * t : (i + 1) * t] = b
    return out


def _joint(mat_c: np.ndarray, tdim: int) -> np.ndarray:
    return kron(mat_c, np.eye(tdim, dtype=complex), max_dim=1 << 20)


def _class_tables(representatives, factors):
    """Transition tables for left multiplication by each factor, as index maps
    over the phase-class representatives."""
    reps = [canonical_phase(m) for _, m in representatives]

    def index_of(m):
        c = canonical_phase(m)
        for i, r in enumerate(reps):
            if np.max(np.abs(c - r)) <= 1e-9:
                return i
        raise RuntimeError("element escaped the expected group")

    return [
        np.array([index_of(f @ rep) for _, rep in representatives]) for f in factors
    ]


@lru_cache(maxsize=None)
def _batch_setup(protocol: str):
    """Precomputed joint round matrix and bookkeeping tables per protocol."""
    if protocol == "CZ":
        g = build_parity_gateset(2)
        enc = LogicalEncoding.build("parity", 2)
        psi = encode(enc, kron(_PSI_1Q.reshape(2, 1), _PHI_1Q.reshape(2, 1)).reshape(-1))
        cdim, tdim = g.control_dim, g.target_dim
        h_k = _control_unitary_matrix(HADAMARD, (0, label_to_index("G2@1", cdim)), cdim)
        h_l = _control_unitary_matrix(HADAMARD, (0, label_to_index("G2@2", cdim)), cdim)
        relabel = np.eye(cdim)[:, [0, 3, 4, 1, 2]].astype(complex)
        c = _interaction_matrix(g)
        w = _joint(h_l, tdim) @ c @ _joint(relabel @ h_k, tdim) @ c @ _joint(h_k, tdim)
        return {
            "w": w,
            "cdim": cdim,
            "tdim": tdim,
            "reset_row": label_to_index("G2@1", cdim),
            "start_target": psi,
            "good_outcome": label_to_index("G2@2", cdim),
        }
    g = build_parity_gateset(1)
    cdim, tdim = g.control_dim, g.target_dim
    c = _interaction_matrix(g)
    enc = LogicalEncoding.build("parity", 1)
    if protocol == "init":
        h = _control_unitary_matrix(HADAMARD, (0, 2), cdim)
        w = _joint(h, tdim) @ c @ _joint(h, tdim)
        start = np.zeros(tdim, dtype=complex)
        start[2] = 1.0  # |10>
        return {"w": w, "cdim": cdim, "tdim": tdim, "reset_row": 0,
                "start_target": start, "good_outcome": 2}
    if protocol == "H":
        h = _control_unitary_matrix(HADAMARD, (1, 2), cdim)
        w = _joint(h, tdim) @ c @ _joint(h, tdim)
        return {"w": w, "cdim": cdim, "tdim": tdim, "reset_row": 1,
                "start_target": encode(enc, _PSI_1Q), "good_outcome": 2}
    if protocol == "T":
        hth = _control_unitary_matrix(HADAMARD @ T_GATE @ HADAMARD, (0, 2), cdim)
        h = _control_unitary_matrix(HADAMARD, (0, 2), cdim)
        w = _joint(h, tdim) @ c @ _joint(hth, tdim)
        return {"w": w, "cdim": cdim, "tdim": tdim, "reset_row": 0,
                "start_target": encode(enc, _PSI_1Q), "good_outcome": 2}
    raise ValueError(f"unknown protocol {protocol!r}")


def _measure_control_batch(amps: np.ndarray, cdim: int, tdim: int, rng):
    """Batched control measurement: amps is (N, cdim*tdim) normalized.

    Returns outcome indices and the renormalized per-trial target vectors.
    """
    n = amps.shape[0]
    tab = amps.reshape(n, cdim, tdim)
    probs = np.einsum("nct,nct->nc", tab, tab.conj()).real
    u = rng.random(n)
    outcome = np.minimum(
        (u[:, None] >= np.cumsum(probs, axis=1)).sum(axis=1), cdim - 1
    )
    rows = np.arange(n)
    tvec = tab[rows, outcome]
    tvec = tvec / np.sqrt(probs[rows, outcome])[:, None]
    return outcome, tvec


def _run_batch(protocol: str, m: int, trials: int, rng) -> np.ndarray:
    setup = _batch_setup(protocol)
    cdim, tdim = setup["cdim"], setup["tdim"]
    w = setup["w"]
    reset_row = setup["reset_row"]
    good = setup["good_outcome"]

    targets = np.tile(setup["start_target"], (trials, 1))
    success = np.zeros(trials, dtype=bool)
    alive = np.arange(trials)

    if protocol == "H":
        tables = _class_tables(GH_REPRESENTATIVES, [HADAMARD_TILDE, HADAMARD])
        cls = np.zeros(trials, dtype=np.int64)
        done_cls = 1  # index of [H]
    elif protocol == "CZ":
        tables = _class_tables(GCNOT_REPRESENTATIVES, [CZ_TILDE, CZ_GATE])
        cls = np.zeros(trials, dtype=np.int64)
        done_cls = 1  # index of [CZ]
    elif protocol == "T":
        tpow = np.zeros(trials, dtype=np.int64)

    for _ in range(m):
        if alive.size == 0:
            break
        amps = np.zeros((alive.size, cdim, tdim), dtype=complex)
        amps[:, reset_row, :] = targets[alive]
        amps = amps.reshape(alive.size, -1) @ w.T
        outcome, tvec = _measure_control_batch(amps, cdim, tdim, rng)
        is_good = outcome == good

        if protocol == "init":
            success[alive[is_good]] = True
            # failure branch: classical measurement of the pair
            fail_idx = alive[~is_good]
            tv = tvec[~is_good]
            if fail_idx.size:
                probs = np.abs(tv) ** 2
                u = rng.random(fail_idx.size)
                x = np.minimum(
                    (u[:, None] >= np.cumsum(probs, axis=1)).sum(axis=1), tdim - 1
                )
                fresh = np.zeros((fail_idx.size, tdim), dtype=complex)
                fresh[np.arange(fail_idx.size), x] = 1.0
                targets[fail_idx] = fresh
            alive = fail_idx
        elif protocol in ("H", "CZ"):
            step = np.where(is_good, tables[1][cls[alive]], tables[0][cls[alive]])
            cls[alive] = step
            now_done = step == done_cls
            success[alive[now_done]] = True
            targets[alive] = tvec
            alive = alive[~now_done]
        else:  # T
            tpow[alive] = (tpow[alive] + np.where(is_good, 1, -1)) % 8
            now_done = np.isin(tpow[alive], (1, 5))
            success[alive[now_done]] = True
            targets[alive] = tvec
            alive = alive[~now_done]
    return success


def _scalar_trial(protocol: str, m: int, rng) -> bool:
    cfg = RusConfig(m)
    if protocol == "CZ":
        g = build_parity_gateset(2)
        enc = LogicalEncoding.build("parity", 2)
        psi = encode(enc, kron(_PSI_1Q.reshape(2, 1), _PHI_1Q.reshape(2, 1)).reshape(-1))
        state = joint_state(g, "G2@1", psi)
        return rus_cz(state, g, 1, 2, cfg, rng).success
    g = build_parity_gateset(1)
    enc = LogicalEncoding.build("parity", 1)
    if protocol == "init":
        start = np.zeros(g.target_dim, dtype=complex)
        start[2] = 1.0
        state = joint_state(g, "1", start)
        return initialize_pair(state, g, 1, cfg, rng).success
    psi = encode(enc, _PSI_1Q)
    if protocol == "H":
        state = joint_state(g, "G1@1", psi)
        return rus_hadamard(state, g, 1, cfg, rng).success
    if protocol == "T":
        state = joint_state(g, "1", psi)
        return rus_t(state, g, 1, cfg, rng).success
    raise ValueError(f"unknown protocol {protocol!r}")


def monte_carlo_success(
    protocol: str, m: int, trials: int, seed: int = 0, batched: bool = True
) -> tuple[float, float]:
    """Empirical success frequency of a protocol with budget m, plus the
    binomial standard error. Deterministic given the seed."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if protocol not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}")
    if batched:
        successes = int(_run_batch(protocol, m, trials, make_rng(seed)).sum())
    else:
        successes = sum(
            _scalar_trial(protocol, m, derive_rng(seed, i)) for i in range(trials)
        )
    estimate = successes / trials
    stderr = math.sqrt(max(estimate * (1.0 - estimate), 1e-12) / trials)
    return estimate, stderr
