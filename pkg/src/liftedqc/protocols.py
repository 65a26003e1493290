"""Repeat-until-success protocols: logical initialization, H, T, CZ/CNOT,
and logical measurement.

Each protocol resets the control register at the start of every iteration
(control preparation is a free primitive), runs the control-interact-control-
measure round, and tracks the group element implemented so far. Elementary
operations are counted with the package convention: every control unitary,
controlled interaction, control measurement, classical target measurement,
and classical correction gate counts as one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .linalg import (
    CZ_GATE,
    CZ_TILDE,
    HADAMARD,
    HADAMARD_TILDE,
    PAULI_Y,
    T_GATE,
    canonical_phase,
    make_rng,
)
from .lift import (
    ClassicalGateSet,
    IDENTITY_LABEL,
    JointState,
    apply_classical_gate,
    control_unitary,
    controlled_apply,
    lift_step,
    measure_control,
    measure_target_classical,
    pair_labels,
    relabel_control,
    reset_control,
)

_HTH = HADAMARD @ T_GATE @ HADAMARD

# phase-class representatives for the groups generated by the RUS loops
GH_REPRESENTATIVES = (
    ("1", np.eye(2, dtype=complex)),
    ("H", HADAMARD),
    ("Ht", HADAMARD_TILDE),
    ("Y", PAULI_Y),
)
GCNOT_REPRESENTATIVES = (
    ("1", np.eye(4, dtype=complex)),
    ("CZ", CZ_GATE),
    ("CZt", CZ_TILDE),
    ("CZt'", CZ_GATE @ CZ_TILDE),
)


@dataclass(frozen=True)
class RusConfig:
    """Iteration budget (the protocol's m) and base seed."""

    max_iters: int
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class ProtocolOutcome:
    success: bool
    iters_used: int
    applied_label: str
    trace: list[tuple[str, float]] = field(default_factory=list)
    final_state: JointState | None = None
    executed_ops: int = 0


def trace_probability(outcome: ProtocolOutcome) -> float:
    """Probability of the exact branch sequence recorded in the trace."""
    return prod(p for _, p in outcome.trace)


def classify_phase_class(op: np.ndarray, representatives, atol: float = 1e-9) -> str:
    canon = canonical_phase(op)
    for label, rep in representatives:
        if np.max(np.abs(canon - canonical_phase(rep))) <= atol:
            return label
    raise RuntimeError("operator does not belong to the expected group")  # defensive


def _rng_for(cfg: RusConfig, rng):
    return rng if rng is not None else make_rng(cfg.seed)


def initialize_pair(
    s: JointState, g: ClassicalGateSet, pair: int, cfg: RusConfig, rng=None
) -> ProtocolOutcome:
    """Drive one pair from a classical basis state to (+/-)|0>_L.

    Succeeds on a "G2" control outcome; on a "1" outcome the pair is measured
    classically and the round is retried.
    """
    rng = _rng_for(cfg, rng)
    _, g2 = pair_labels(pair)
    subspace = (IDENTITY_LABEL, g2)
    trace: list[tuple[str, float]] = []
    ops = 0
    for it in range(1, cfg.max_iters + 1):
        s = reset_control(s, IDENTITY_LABEL)
        res = lift_step(s, HADAMARD, HADAMARD, subspace, g, rng)
        ops += 4  # 2 control unitaries + interaction + control measurement
        s = res.post_state
        trace.append((res.outcome_label, res.branch_probability))
        if res.outcome_label == g2:
            return ProtocolOutcome(True, it, "init0", trace, s, ops)
        bits, s, p = measure_target_classical(s, pair, rng)
        ops += 1
        trace.append((f"target@{pair}:{bits}", p))
    return ProtocolOutcome(False, cfg.max_iters, "classical", trace, s, ops)


def rus_hadamard(
    s: JointState, g: ClassicalGateSet, pair: int, cfg: RusConfig, rng=None
) -> ProtocolOutcome:
    """Hadamard on logical qubit ``pair`` by walking G_H = {[1],[H],[Ht],[Y]}."""
    rng = _rng_for(cfg, rng)
    g1, g2 = pair_labels(pair)
    subspace = (g1, g2)
    acc = np.eye(2, dtype=complex)
    trace: list[tuple[str, float]] = []
    ops = 0
    label = "1"
    for it in range(1, cfg.max_iters + 1):
        s = reset_control(s, g1)
        res = lift_step(s, HADAMARD, HADAMARD, subspace, g, rng)
        ops += 4
        s = res.post_state
        trace.append((res.outcome_label, res.branch_probability))
        factor = HADAMARD if res.outcome_label == g2 else HADAMARD_TILDE
        acc = factor @ acc
        label = classify_phase_class(acc, GH_REPRESENTATIVES)
        if label == "H":
            return ProtocolOutcome(True, it, "H", trace, s, ops)
    return ProtocolOutcome(False, cfg.max_iters, label, trace, s, ops)


def rus_t(
    s: JointState, g: ClassicalGateSet, pair: int, cfg: RusConfig, rng=None
) -> ProtocolOutcome:
    """T gate on logical qubit ``pair`` via a walk on the cyclic group of T
    powers; success at T^1 directly or at T^5 followed by a classical G2
    correction (T = Z T^5)."""
    rng = _rng_for(cfg, rng)
    _, g2 = pair_labels(pair)
    subspace = (IDENTITY_LABEL, g2)
    j = 0
    trace: list[tuple[str, float]] = []
    ops = 0
    for it in range(1, cfg.max_iters + 1):
        s = reset_control(s, IDENTITY_LABEL)
        res = lift_step(s, _HTH, HADAMARD, subspace, g, rng)
        ops += 4
        s = res.post_state
        trace.append((res.outcome_label, res.branch_probability))
        j = (j + 1) % 8 if res.outcome_label == g2 else (j - 1) % 8
        if j == 1:
            return ProtocolOutcome(True, it, "T", trace, s, ops)
        if j == 5:
            s = apply_classical_gate(s, g, g2)
            ops += 1
            trace.append((f"classical:{g2}", 1.0))
            return ProtocolOutcome(True, it, "T", trace, s, ops)
    return ProtocolOutcome(False, cfg.max_iters, f"T^{j}", trace, s, ops)


def rus_cz(
    s: JointState,
    g: ClassicalGateSet,
    pair_k: int,
    pair_l: int,
    cfg: RusConfig,
    rng=None,
) -> ProtocolOutcome:
    """CZ on logical qubits (pair_k, pair_l) walking G_CNOT = {1, CZ, CZt, CZt'}.

    One iteration: H on {|1>,|G2@k>}, interact, H again, relabel k->l,
    interact, H on {|1>,|G2@l>}, measure.
    """
    if pair_k == pair_l:
        raise ValueError("CZ pairs must be distinct")
    rng = _rng_for(cfg, rng)
    _, g2k = pair_labels(pair_k)
    _, g2l = pair_labels(pair_l)
    acc = np.eye(4, dtype=complex)
    trace: list[tuple[str, float]] = []
    ops = 0
    label = "1"
    for it in range(1, cfg.max_iters + 1):
        s = reset_control(s, g2k)
        s = control_unitary(s, HADAMARD, (IDENTITY_LABEL, g2k))
        s = controlled_apply(s, g)
        s = control_unitary(s, HADAMARD, (IDENTITY_LABEL, g2k))
        s = relabel_control(s, pair_k, pair_l)
        s = controlled_apply(s, g)
        s = control_unitary(s, HADAMARD, (IDENTITY_LABEL, g2l))
        outcome, s, p = measure_control(s, rng)
        ops += 7  # 3 control unitaries + relabel + 2 interactions + measurement
        trace.append((outcome, p))
        factor = CZ_GATE if outcome == g2l else CZ_TILDE
        acc = factor @ acc
        label = classify_phase_class(acc, GCNOT_REPRESENTATIVES)
        if label == "CZ":
            return ProtocolOutcome(True, it, "CZ", trace, s, ops)
    return ProtocolOutcome(False, cfg.max_iters, label, trace, s, ops)


def rus_cnot(
    s: JointState,
    g: ClassicalGateSet,
    control_q: int,
    target_q: int,
    cfg: RusConfig,
    rng=None,
) -> ProtocolOutcome:
    """CNOT = (1 x H) CZ (1 x H); each stage gets its own max_iters budget."""
    if control_q == target_q:
        raise ValueError("CNOT operands must be distinct")
    rng = _rng_for(cfg, rng)
    stages = (
        ("H1", lambda st: rus_hadamard(st, g, target_q, cfg, rng)),
        ("CZ", lambda st: rus_cz(st, g, control_q, target_q, cfg, rng)),
        ("H2", lambda st: rus_hadamard(st, g, target_q, cfg, rng)),
    )
    trace: list[tuple[str, float]] = []
    iters = 0
    ops = 0
    for stage_name, run in stages:
        out = run(s)
        trace.extend((f"{stage_name}:{lbl}", p) for lbl, p in out.trace)
        iters += out.iters_used
        ops += out.executed_ops
        s = out.final_state
        if not out.success:
            label = f"failed@{stage_name}:{out.applied_label}"
            return ProtocolOutcome(False, iters, label, trace, s, ops)
    return ProtocolOutcome(True, iters, "CNOT", trace, s, ops)


_SWAP_LOGICAL_BITS = {"1000": 0, "0100": 0, "0010": 1, "0001": 1}


def measure_logical(s: JointState, pair: int, rng) -> tuple[int, JointState, float]:
    """Read out one logical qubit via a classical measurement of its pair."""
    bits, post, p = measure_target_classical(s, pair, rng)
    if s.qubits_per_pair == 2:
        bit = 0 if bits[0] == "1" else 1
    else:
        if bits not in _SWAP_LOGICAL_BITS:
            raise RuntimeError(f"non-logical block outcome {bits!r}")  # defensive
        bit = _SWAP_LOGICAL_BITS[bits]
    return bit, post, p
