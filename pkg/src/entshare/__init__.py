"""Tripartite entanglement protocols: secret sharing over two GHZ triples
and secure dense coding over a W state, on an exact state-vector engine."""

__version__ = "0.1.0"

from .canon import BellOutcome, CbitPair, PauliOp, bell_state, cbits_to_pauli, ghz3, pauli_to_cbits, w3, w_n
from .qstate import (
    CapacityError,
    StateVector,
    apply_cnot,
    apply_one_qubit,
    apply_pauli,
    basis_state,
    fidelity,
    inner_product,
    measure_computational,
    states_equal,
    tensor,
)
from .bellmeas import (
    BellBranch,
    DecompositionTable,
    bell_project,
    decompose_two_ghz,
    measure_bell,
    verify_published_tables,
)
from .qss import (
    DeclarationPolicy,
    Party,
    QssTranscript,
    SessionReport,
    decode_qss,
    marginal_information,
    qss_decode_table,
    run_qss_round,
    run_qss_session,
)
from .sdc import (
    CheatReport,
    SdcTrial,
    bob_alone_guess,
    bob_alone_posterior,
    charlie_alone_posterior,
    cheat_report,
    decode_sdc,
    run_sdc_n_party,
    run_sdc_round,
    sdc_decode_table,
)
from .adversary import (
    AdversaryModel,
    CheckRound,
    check_fail_probability,
    check_round,
    late_declarer_attack,
    substitute_qubit_attack,
)
from .harness import Statistics, TrialConfig, compare_analytic, run_trials, wilson_interval

__all__ = [name for name in dir() if not name.startswith("_")]
