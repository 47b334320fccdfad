"""Executable attack models and the correlation check that catches them.

The concrete security check is a GHZ parity test: each holder of a
check triple measures X or Y (chosen uniformly), rounds with an odd
number of Y choices are redrawn, and the verdict is pass iff the product
of results is +1 for XXX and -1 for the two-Y combinations.  An honest
channel passes every conclusive round; the per-round failure probability
of each attack is computed exactly from the state (never asserted from
folklore) and cross-checked by sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cache
from itertools import product

import numpy as np

from .canon import PauliOp, ghz3
from .qss import (
    DeclarationPolicy,
    Party,
    QssTranscript,
    decode_qss,
    marginal_information,
    posterior_guess,
    random_op,
    run_qss_round,
)
from .bellmeas import bell_project, decompose_two_ghz, ghz_pair, measure_bell
from .qstate import (
    StateVector,
    apply_cnot,
    apply_one_qubit,
    apply_pauli,
    basis_state,
    inner_product,
    measure_computational,
    tensor,
)
from .streams import stream

KINDS = ("none", "ancilla-entangle", "intercept-resend", "substitute-qubit", "late-declarer")
BASES = ("computational", "x", "y")
COUPLINGS = ("flip", "trivial")

_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
_SDG = np.array([[1, 0], [0, -1j]], dtype=np.complex128)
# rotations mapping the measured basis onto the computational one
_TO_COMPUTATIONAL = {"x": _H, "y": _H @ _SDG}

#: Conclusive basis combinations and the parity each must show on a clean channel.
PARITY_TARGETS = {("X", "X", "X"): 1, ("X", "Y", "Y"): -1, ("Y", "X", "Y"): -1, ("Y", "Y", "X"): -1}

#: Which single check-triple qubit each party holds.
_CHECK_QUBIT = {Party.ALICE: 1, Party.BOB: 2, Party.CHARLIE: 3}


@dataclass(frozen=True)
class AdversaryModel:
    """One attack per session: what it is and which channel/party it hits."""

    kind: str
    target: Party = Party.BOB
    basis: str = "computational"  # intercept-resend measurement basis
    coupling: str = "flip"  # ancilla coupling: controlled flip or trivial

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind: {self.kind}")
        if self.basis not in BASES:
            raise ValueError(f"unknown basis: {self.basis}")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"unknown coupling: {self.coupling}")
        if self.kind in ("intercept-resend", "substitute-qubit", "ancilla-entangle") and self.target == Party.ALICE:
            raise ValueError("channel attacks target a transmitted qubit, not Alice's")

    @staticmethod
    def none() -> "AdversaryModel":
        return AdversaryModel("none")


@dataclass(frozen=True)
class CheckRound:
    """One conclusive parity-check round."""

    bases: tuple[str, str, str]
    results: tuple[int, int, int]
    verdict: str  # pass | fail
    draws: int = 1  # basis draws needed to reach a conclusive combination


def _measure_pm(state: StateVector, q: int, basis: str, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Measure +-1 in the X or Y basis of qubit q."""
    rotated = apply_one_qubit(state, q, _TO_COMPUTATIONAL[basis.lower()])
    bit, after = measure_computational(rotated, q, rng)
    return 1 - 2 * bit, after


def _intercept(state: StateVector, q: int, basis: str, rng: np.random.Generator) -> StateVector:
    """Measure qubit q in the given basis and resend the matching eigenstate."""
    if basis == "computational":
        _, after = measure_computational(state, q, rng)
        return after
    u = _TO_COMPUTATIONAL[basis]
    rotated = apply_one_qubit(state, q, u)
    _, after = measure_computational(rotated, q, rng)
    return apply_one_qubit(after, q, u.conj().T)


def _intercept_branches(state: StateVector, q: int, basis: str) -> list[tuple[float, StateVector]]:
    """Both post-intercept branches with their exact probabilities."""
    if basis == "computational":
        u = None
        work = state
    else:
        u = _TO_COMPUTATIONAL[basis]
        work = apply_one_qubit(state, q, u)
    psi = work.amps.reshape((2,) * work.n_qubits)
    out = []
    for bit in (0, 1):
        p = float(np.sum(np.abs(np.take(psi, bit, axis=q - 1)) ** 2))
        if p < 1e-12:
            continue
        keep = psi.copy()
        sel = [slice(None)] * work.n_qubits
        sel[q - 1] = 1 - bit
        keep[tuple(sel)] = 0.0
        branch = StateVector(work.n_qubits, (keep / math.sqrt(p)).reshape(-1))
        if u is not None:
            branch = apply_one_qubit(branch, q, u.conj().T)
        out.append((p, branch))
    return out


def _check_setup(model: AdversaryModel) -> tuple[StateVector, tuple[int, int, int], int | None]:
    """Pre-attack check state, the qubits the parties measure, attacked qubit."""
    g = ghz3()
    if model.kind == "intercept-resend":
        return g, (1, 2, 3), _CHECK_QUBIT[model.target]
    if model.kind == "ancilla-entangle":
        state = tensor(g, basis_state(1, [0]))
        if model.coupling == "flip":
            state = apply_cnot(state, _CHECK_QUBIT[model.target], 4)
        return state, (1, 2, 3), None
    if model.kind == "substitute-qubit":
        # Bob keeps Charlie's genuine qubit; Charlie checks a prepared |0>
        return tensor(g, basis_state(1, [0])), (1, 2, 4), None
    return g, (1, 2, 3), None


def check_round(model: AdversaryModel, rng: np.random.Generator) -> CheckRound:
    """Run one parity-check round; inconclusive basis draws are redrawn."""
    draws = 0
    while True:
        draws += 1
        bases = tuple("Y" if b else "X" for b in rng.integers(0, 2, size=3))
        if bases in PARITY_TARGETS:
            break
    state, qubits, attacked = _check_setup(model)
    if attacked is not None:
        state = _intercept(state, attacked, model.basis, rng)
    results = []
    for q, basis in zip(qubits, bases):
        r, state = _measure_pm(state, q, basis, rng)
        results.append(r)
    parity = results[0] * results[1] * results[2]
    verdict = "pass" if parity == PARITY_TARGETS[bases] else "fail"
    return CheckRound(bases, tuple(results), verdict, draws)


def _parity_expectation(state: StateVector, qubits, bases) -> float:
    """<state| O |state> for the product of X/Y on the given qubits."""
    transformed = state
    for q, basis in zip(qubits, bases):
        transformed = apply_one_qubit(transformed, q, _SX if basis == "X" else _SY)
    return inner_product(state, transformed).real


@cache
def check_fail_probability(model: AdversaryModel) -> float:
    """Exact per-conclusive-round failure probability under the attack.

    Averages P(parity != target) = (1 - target * <O>)/2 over the four
    conclusive basis combinations and, for intercept attacks, over both
    interception branches.
    """
    base_state, qubits, attacked = _check_setup(model)
    if attacked is None:
        branches = [(1.0, base_state)]
    else:
        branches = _intercept_branches(base_state, attacked, model.basis)
    fail = 0.0
    for bases, target in PARITY_TARGETS.items():
        for p, state in branches:
            expectation = _parity_expectation(state, qubits, bases)
            fail += 0.25 * p * (1.0 - target * expectation) / 2.0
    return fail


def session_detection_probability(model: AdversaryModel, conclusive_rounds: int) -> float:
    """P(at least one failed check) across independent conclusive rounds."""
    p = check_fail_probability(model)
    return 1.0 - (1.0 - p) ** conclusive_rounds


def message_channel(model: AdversaryModel):
    """State disturbance the attack applies to the six-qubit message channel."""
    if model.kind == "intercept-resend":
        pair = {Party.BOB: (2, 5), Party.CHARLIE: (3, 6)}[model.target]

        def disturb(state: StateVector, rng: np.random.Generator) -> StateVector:
            for q in pair:
                state = _intercept(state, q, model.basis, rng)
            return state

        return disturb
    if model.kind == "ancilla-entangle":
        q = {Party.BOB: 2, Party.CHARLIE: 3}[model.target]

        def attach(state: StateVector, rng: np.random.Generator) -> StateVector:
            state = tensor(state, basis_state(1, [0]))
            if model.coupling == "flip":
                state = apply_cnot(state, q, state.n_qubits)
            return state

        return attach
    return None


# ---------------------------------------------------------------------------
# Qubit substitution: Bob swaps prepared states into Charlie's channel.
# ---------------------------------------------------------------------------


@dataclass
class SubstituteAttackReport:
    """Statistics of rounds run with Charlie's qubits substituted."""

    rounds: int
    inconsistent: int
    inconsistent_rate: float
    analytic_inconsistent_rate: float
    check_fail_probability: float
    seed: int
    transcripts: list[QssTranscript] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "model": "substitute-qubit",
            "rounds": self.rounds,
            "inconsistent": self.inconsistent,
            "inconsistent_rate": self.inconsistent_rate,
            "analytic_inconsistent_rate": self.analytic_inconsistent_rate,
            "check_fail_probability": self.check_fail_probability,
            "seed": self.seed,
        }


def _substituted_state() -> StateVector:
    """Genuine six-qubit channel plus Bob's two prepared |0> qubits (labels 7, 8)."""
    return tensor(ghz_pair(), basis_state(2, [0, 0]))


def substitute_round(rng: np.random.Generator, op: PauliOp | None = None) -> tuple[QssTranscript, bool]:
    """One round with Charlie Bell-measuring the substituted pair."""
    if op is None:
        op = random_op(rng)
    state = apply_pauli(_substituted_state(), 1, op)
    labels = list(range(1, 9))
    outcomes = []
    for a, b in ((1, 4), (2, 5), (7, 8)):
        ia, ib = labels.index(a) + 1, labels.index(b) + 1
        outcome, state = measure_bell(state, ia, ib, rng)
        outcomes.append(outcome)
        labels = [q for q in labels if q not in (a, b)]
    o14, o25, o78 = outcomes
    decoded = decode_qss(o14, o25, o78)
    t = QssTranscript(op, o14, o25, o78, (Party.ALICE, Party.BOB, Party.CHARLIE), decoded)
    return t, decoded is None


@cache
def substitute_inconsistent_rate() -> float:
    """Exact probability that a substituted round yields an unrealizable triple.

    Computed by projecting the substituted joint state onto all 64
    outcome triples; identical for every encoded operation.
    """
    rates = []
    for op in PauliOp:
        state = apply_pauli(_substituted_state(), 1, op)
        bad = 0.0
        for o14, p14, r14 in bell_project(state, 1, 4):
            if p14 == 0.0:
                continue
            # labels after removing 1,4: [2,3,5,6,7,8] -> pair (2,5) at positions (1,3)
            for o25, p25, r25 in bell_project(r14, 1, 3):
                if p25 == 0.0:
                    continue
                # labels now [3,6,7,8] -> pair (7,8) at positions (3,4)
                for o78, p78, _ in bell_project(r25, 3, 4):
                    if p78 == 0.0:
                        continue
                    if decode_qss(o14, o25, o78) is None:
                        bad += p14 * p25 * p78
        rates.append(bad)
    if max(rates) - min(rates) > 1e-12:
        raise AssertionError(f"inconsistency rate depends on the operation: {rates}")
    return rates[0]


def substitute_qubit_attack(rounds: int = 10000, seed: int = 0, collect_transcripts: bool = False) -> SubstituteAttackReport:
    """Run substituted rounds and report how the triple structure breaks."""
    transcripts = []
    inconsistent = 0
    for i in range(rounds):
        rng = stream(seed, i)
        t, bad = substitute_round(rng)
        inconsistent += bad
        if collect_transcripts:
            transcripts.append(t)
    return SubstituteAttackReport(
        rounds=rounds,
        inconsistent=inconsistent,
        inconsistent_rate=inconsistent / rounds,
        analytic_inconsistent_rate=substitute_inconsistent_rate(),
        check_fail_probability=check_fail_probability(AdversaryModel("substitute-qubit", Party.CHARLIE)),
        seed=seed,
        transcripts=transcripts,
    )


# ---------------------------------------------------------------------------
# The late declarer: Bob stalls until the others have spoken.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LateDeclarerReport:
    policy: str
    analytic_success: float
    empirical_success: float | None
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "model": "late-declarer",
            "policy": self.policy,
            "analytic_success": self.analytic_success,
            "empirical_success": self.empirical_success,
            "trials": self.trials,
            "seed": self.seed,
        }


def _bob_guess(transcript: QssTranscript, heard: set[Party]) -> PauliOp:
    """Bob's best guess from his own outcome plus declarations heard so far."""
    post = marginal_information(
        o14=transcript.outcome_14 if Party.ALICE in heard else None,
        o25=transcript.outcome_25,
        o36=transcript.outcome_36 if Party.CHARLIE in heard else None,
    )
    return posterior_guess(post)


@cache
def _info_accuracy(know_alice: bool, know_charlie: bool) -> float:
    """Exact guess accuracy for Bob given which declarations he heard.

    Enumerates the 32 realizable triples (uniform secret, uniform
    branches) and scores the argmax of the corresponding posterior.
    """
    hits = 0.0
    for op in PauliOp:
        for branch in decompose_two_ghz(op).branches:
            o14, o25, o36 = branch.triple
            post = marginal_information(
                o14=o14 if know_alice else None,
                o25=o25,
                o36=o36 if know_charlie else None,
            )
            if posterior_guess(post) == op:
                hits += 0.25 * branch.probability
    return hits


def _orders_for_policy(policy: DeclarationPolicy) -> list[tuple[float, tuple[Party, ...]]]:
    if policy.mode == "fixed":
        return [(1.0, policy.order)]
    if policy.mode == "round-robin":
        rotations = [policy.order[k:] + policy.order[:k] for k in range(3)]
        return [(1.0 / 3.0, r) for r in rotations]
    from itertools import permutations

    return [(1.0 / 6.0, p) for p in permutations(policy.order)]


def late_declarer_analytic(policy: DeclarationPolicy) -> float:
    """Expected success of Bob's stalling strategy under the declaration policy."""
    total = 0.0
    for weight, order in _orders_for_policy(policy):
        before = set()
        for party in order:
            if party == Party.BOB:
                break
            before.add(party)
        total += weight * _info_accuracy(Party.ALICE in before, Party.CHARLIE in before)
    return total


def late_declarer_trial(policy: DeclarationPolicy, rng: np.random.Generator, round_index: int = 0) -> bool:
    """One round: honest physics, Bob guesses from what he heard before his turn."""
    t = run_qss_round(None, rng, policy=policy, round_index=round_index)
    heard = set()
    for party in t.declaration_order:
        if party == Party.BOB:
            break
        heard.add(party)
    return _bob_guess(t, heard) == t.encoded_op


def late_declarer_attack(
    policy: DeclarationPolicy, trials: int = 0, seed: int = 0
) -> LateDeclarerReport:
    analytic = late_declarer_analytic(policy)
    empirical = None
    if trials > 0:
        hits = 0
        for i in range(trials):
            hits += late_declarer_trial(policy, stream(seed, i), round_index=i)
        empirical = hits / trials
    return LateDeclarerReport(policy.mode, analytic, empirical, trials, seed)
