"""Simulator and verification suite for universal quantum computation via
quantum-controlled classical operations."""

from .linalg import (
    apply_unitary,
    canonical_phase,
    derive_rng,
    fidelity_up_to_phase,
    kron,
    make_rng,
    measure_projective,
)
from .lift import (
    ClassicalGate,
    ClassicalGateSet,
    ControlBasis,
    JointState,
    LiftStepResult,
    build_parity_gateset,
    build_swap_gateset,
    control_unitary,
    controlled_apply,
    joint_state,
    lift_step,
    measure_control,
    measure_target_classical,
    relabel_control,
    reset_control,
)
from .encoding import LogicalEncoding, encode, project_logical, verify_pauli_action
from .protocols import (
    ProtocolOutcome,
    RusConfig,
    initialize_pair,
    measure_logical,
    rus_cnot,
    rus_cz,
    rus_hadamard,
    rus_t,
)
from .circuit import (
    CircuitSpec,
    RunReport,
    estimate_cost,
    parse_circuit,
    random_circuit,
    run_lifted,
    run_reference,
    sample_circuit,
)
from .analysis import (
    enumerate_group,
    monte_carlo_success,
    success_prob_gate,
    success_prob_init,
    walk_absorption_prob,
)

__version__ = "0.1.0"
