"""Three-party secret sharing over two GHZ triples, as an executable protocol.

Alice keeps qubits 1 and 4, Bob holds 2 and 5, Charlie holds 3 and 6.
A round encodes one of the four operations on qubit 1, Bell-measures the
pairs (1,4), (2,5), (3,6) in that fixed order, and decodes from the
outcome triple.  The decode table is generated from the decomposition
oracle at first use; nothing physical is hand-entered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cache
from typing import Callable, Optional

import numpy as np

from .bellmeas import PAIRS, decompose_two_ghz, measure_bell, ghz_pair
from .canon import BellOutcome, PauliOp, pauli_to_cbits
from .qstate import StateVector, apply_pauli
from .streams import SCHEDULER_INDEX, stream

Triple = tuple[BellOutcome, BellOutcome, BellOutcome]

PAULI_OPS = tuple(PauliOp)


class Party(Enum):
    ALICE = "alice"
    BOB = "bob"
    CHARLIE = "charlie"


_PARTIES = (Party.ALICE, Party.BOB, Party.CHARLIE)

#: Which outcome of the round each party holds.
PARTY_PAIR = {Party.ALICE: (1, 4), Party.BOB: (2, 5), Party.CHARLIE: (3, 6)}


@dataclass(frozen=True)
class DeclarationPolicy:
    """Order in which the three parties publicly declare their outcomes.

    Modes: ``fixed`` (always ``order``), ``round-robin`` (``order``
    rotated by round index), ``random`` (fresh uniform permutation each
    round, the default countermeasure against a late declarer).
    """

    mode: str = "random"
    order: tuple[Party, Party, Party] = _PARTIES

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "round-robin", "random"):
            raise ValueError(f"unknown declaration mode: {self.mode}")
        if sorted(p.value for p in self.order) != sorted(p.value for p in _PARTIES):
            raise ValueError(f"order must be a permutation of the three parties: {self.order}")

    def order_for_round(self, round_index: int, rng: np.random.Generator) -> tuple[Party, Party, Party]:
        if self.mode == "fixed":
            return self.order
        if self.mode == "round-robin":
            k = round_index % 3
            return self.order[k:] + self.order[:k]
        perm = rng.permutation(3)
        return tuple(self.order[int(i)] for i in perm)  # type: ignore[return-value]


@dataclass(frozen=True)
class QssTranscript:
    """One full round: encoding, the three Bell outcomes, order, decode."""

    encoded_op: PauliOp
    outcome_14: BellOutcome
    outcome_25: BellOutcome
    outcome_36: BellOutcome
    declaration_order: tuple[Party, Party, Party]
    decoded_op: Optional[PauliOp]  # None marks an inconsistent triple

    @property
    def triple(self) -> Triple:
        return (self.outcome_14, self.outcome_25, self.outcome_36)

    def outcome_of(self, party: Party) -> BellOutcome:
        return {Party.ALICE: self.outcome_14, Party.BOB: self.outcome_25, Party.CHARLIE: self.outcome_36}[party]


@cache
def qss_decode_table() -> dict[Triple, PauliOp]:
    """Outcome triple -> encoded operation, over the 32 realizable triples."""
    table: dict[Triple, PauliOp] = {}
    for op in PauliOp:
        for branch in decompose_two_ghz(op).branches:
            triple = branch.triple
            if triple in table:
                raise AssertionError(f"triple {triple} appears under two operations")
            table[triple] = op
    return table


def decode_qss(o14: BellOutcome, o25: BellOutcome, o36: BellOutcome) -> Optional[PauliOp]:
    """Look up the encoded operation; None if the triple is unrealizable.

    An inconsistent triple signals channel corruption or cheating, not a
    programming error.
    """
    return qss_decode_table().get((o14, o25, o36))


def random_op(rng: np.random.Generator) -> PauliOp:
    return PAULI_OPS[int(rng.integers(4))]


def run_qss_round(
    op: Optional[PauliOp],
    rng: np.random.Generator,
    *,
    policy: DeclarationPolicy = DeclarationPolicy(),
    round_index: int = 0,
    channel: Optional[Callable[[StateVector, np.random.Generator], StateVector]] = None,
) -> QssTranscript:
    """Run one round; ``op=None`` encodes a uniformly random secret.

    ``channel`` optionally disturbs the six-qubit state after
    distribution and before encoding (where an eavesdropper acts).
    """
    if op is None:
        op = random_op(rng)
    state = ghz_pair()
    if channel is not None:
        state = channel(state, rng)
    state = apply_pauli(state, 1, op)

    labels = list(range(1, state.n_qubits + 1))
    outcomes = []
    for a, b in PAIRS:
        ia, ib = labels.index(a) + 1, labels.index(b) + 1
        outcome, state = measure_bell(state, ia, ib, rng)
        outcomes.append(outcome)
        labels = [q for q in labels if q not in (a, b)]
    o14, o25, o36 = outcomes

    order = policy.order_for_round(round_index, rng)
    return QssTranscript(op, o14, o25, o36, order, decode_qss(o14, o25, o36))


# ---------------------------------------------------------------------------
# What partial knowledge of the outcomes reveals.
# ---------------------------------------------------------------------------


def marginal_information(
    o14: Optional[BellOutcome] = None,
    o25: Optional[BellOutcome] = None,
    o36: Optional[BellOutcome] = None,
) -> dict[PauliOp, float]:
    """Exact posterior over the encoded operation given a subset of outcomes.

    Uniform prior; likelihoods are branch counts from the decomposition
    tables (every branch has probability 1/8).
    """
    known = (o14, o25, o36)
    weights = {}
    for op in PauliOp:
        matching = 0
        for branch in decompose_two_ghz(op).branches:
            if all(k is None or k == o for k, o in zip(known, branch.triple)):
                matching += 1
        weights[op] = matching / 8.0
    total = sum(weights.values())
    if total == 0.0:
        raise ValueError(f"outcome combination {known} is unrealizable")
    return {op: w / total for op, w in weights.items()}


def posterior_guess(posterior: dict[PauliOp, float]) -> PauliOp:
    """Argmax guess; ties break toward the lowest two-bit encoding."""
    return max(PauliOp, key=lambda op: (posterior.get(op, 0.0), -pauli_to_cbits(op).as_int()))


def entropy_bits(dist: dict) -> float:
    return -sum(p * math.log2(p) for p in dist.values() if p > 0.0)


# ---------------------------------------------------------------------------
# Sessions: check rounds interleaved with message rounds.
# ---------------------------------------------------------------------------


@dataclass
class SessionReport:
    """Aggregate outcome of one secret-sharing session."""

    rounds: int
    check_rounds: int
    failures: int
    decode_accuracy: float
    tamper_count: int
    adversary: str
    seed: int
    transcripts: list[QssTranscript] = field(default_factory=list, repr=False)

    @property
    def aborted(self) -> bool:
        return self.failures > 0

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "check_rounds": self.check_rounds,
            "failures": self.failures,
            "decode_accuracy": self.decode_accuracy,
            "tamper_count": self.tamper_count,
            "adversary": self.adversary,
            "seed": self.seed,
        }


def run_qss_session(
    n_message_rounds: int,
    check_fraction: float = 0.5,
    adversary=None,
    seed: int = 0,
    policy: DeclarationPolicy = DeclarationPolicy(),
    collect_transcripts: bool = False,
) -> SessionReport:
    """Interleave security-check rounds with message rounds.

    Each round is a check with probability ``check_fraction``; the
    session aborts on the first failed check.  Per-round randomness uses
    the documented split ``stream(seed, round_index)``; the scheduler
    draws from the reserved stream.
    """
    from . import adversary as adv  # deferred: adversary imports this module

    if n_message_rounds < 1:
        raise ValueError("need at least one message round")
    if not 0.0 <= check_fraction < 1.0:
        raise ValueError("check_fraction must be in [0, 1); 1.0 would never finish a message")
    model = adversary if adversary is not None else adv.AdversaryModel.none()
    channel = adv.message_channel(model)

    sched = stream(seed, SCHEDULER_INDEX)
    transcripts: list[QssTranscript] = []
    messages = correct = tampered = checks = failures = 0
    round_index = 0
    while messages < n_message_rounds:
        rng = stream(seed, round_index)
        round_index += 1
        if sched.random() < check_fraction:
            checks += 1
            if adv.check_round(model, rng).verdict == "fail":
                failures += 1
                break
            continue
        t = run_qss_round(None, rng, policy=policy, round_index=messages, channel=channel)
        messages += 1
        if t.decoded_op is None:
            tampered += 1
        elif t.decoded_op == t.encoded_op:
            correct += 1
        if collect_transcripts:
            transcripts.append(t)

    accuracy = correct / messages if messages else 0.0
    return SessionReport(
        rounds=messages,
        check_rounds=checks,
        failures=failures,
        decode_accuracy=accuracy,
        tamper_count=tampered,
        adversary=model.kind,
        seed=seed,
        transcripts=transcripts,
    )
