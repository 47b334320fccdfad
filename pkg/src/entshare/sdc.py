"""Secure dense coding over a shared W state, with solo-cheat analysis.

Alice holds qubit 1 of a W state and encodes two classical bits with a
local operation.  She sends her qubit to one receiver, who Bell-measures
it against his own; every other user measures computationally.  The
round succeeds only when all bystander bits are 0 (probability
2/(m) on the m-qubit W state), and on success the receiver's Bell
outcome pins down the operation exactly — but only together with the
bystanders' bits does it become usable, which is what keeps a lone
receiver at 2/3 and a lone bystander at 1/4.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from typing import Optional

import numpy as np

from .bellmeas import bell_project, measure_bell
from .canon import BellOutcome, PauliOp, w_n
from .qss import PAULI_OPS, Party, posterior_guess, random_op
from .qstate import StateVector, apply_pauli, measure_computational
from .streams import stream

SUCCESS = "success"
ABORT = "abort"

#: Receiver parties allowed in the three-party protocol and their Bell pair.
RECEIVER_PAIR = {Party.BOB: (1, 2), Party.CHARLIE: (1, 3)}


@dataclass(frozen=True)
class SdcTrial:
    """One dense-coding round."""

    encoded_op: PauliOp
    receiver: str
    bell_outcome: BellOutcome
    bystander_bits: tuple[int, ...]
    status: str  # SUCCESS or ABORT
    decoded_op: Optional[PauliOp]

    def csv_row(self, seed) -> list:
        return [
            seed,
            self.encoded_op.value,
            self.receiver,
            self.bell_outcome.value,
            "".join(str(b) for b in self.bystander_bits),
            self.status,
            self.decoded_op.value if self.decoded_op is not None else "",
        ]


CSV_HEADER = ["seed", "op", "receiver", "bell_outcome", "bystander_bits", "status", "decoded_op"]


@cache
def _encoded(op: PauliOp, m: int = 3) -> StateVector:
    return apply_pauli(w_n(m), 1, op)


@cache
def joint_distribution(op: PauliOp, receiver: Party = Party.BOB) -> dict[tuple[BellOutcome, int], float]:
    """Exact P(bell outcome, bystander bit | op) for the three-party round."""
    i, j = RECEIVER_PAIR[receiver]
    dist: dict[tuple[BellOutcome, int], float] = {}
    for outcome, p, resid in bell_project(_encoded(op), i, j):
        if p == 0.0:
            continue
        assert resid is not None
        p1 = float(abs(resid.amps[1]) ** 2)
        dist[(outcome, 0)] = dist.get((outcome, 0), 0.0) + p * (1.0 - p1)
        dist[(outcome, 1)] = dist.get((outcome, 1), 0.0) + p * p1
    return dist


@cache
def sdc_decode_table(receiver: Party = Party.BOB) -> dict[BellOutcome, PauliOp]:
    """Bell outcome -> operation, valid when every bystander bit is 0.

    Generated from the state machine: conditioned on success the Bell
    outcome is a deterministic function of the operation, and the map is
    a bijection over the four outcomes.
    """
    table: dict[BellOutcome, PauliOp] = {}
    for op in PauliOp:
        dist = joint_distribution(op, receiver)
        winners = [b for (b, bit), p in dist.items() if bit == 0 and p > 1e-12]
        if len(winners) != 1:
            raise AssertionError(f"success branch of {op} is not deterministic: {winners}")
        if winners[0] in table:
            raise AssertionError(f"outcome {winners[0]} decodes two operations")
        table[winners[0]] = op
    return table


def decode_sdc(b: BellOutcome, bystander_bits) -> Optional[PauliOp]:
    """Table lookup when all bystander bits are 0; None marks an abort."""
    if any(bystander_bits):
        return None
    return sdc_decode_table()[b]


def run_sdc_round(op: PauliOp, rng: np.random.Generator, receiver: Party = Party.BOB) -> SdcTrial:
    """One three-party round: encode, Bell-measure at the receiver, read the bystander."""
    i, j = RECEIVER_PAIR[receiver]
    outcome, resid = measure_bell(_encoded(op), i, j, rng)
    assert resid is not None
    bit, _ = measure_computational(resid, 1, rng)
    decoded = decode_sdc(outcome, (bit,))
    status = SUCCESS if bit == 0 else ABORT
    return SdcTrial(op, receiver.value, outcome, (bit,), status, decoded)


def run_sdc_n_party(
    n_users: int, receiver: int, op: PauliOp, rng: np.random.Generator
) -> SdcTrial:
    """Round over the (n_users + 1)-qubit W state.

    ``receiver`` is the 1-based user index; user k holds qubit k + 1.
    Bystanders measure in ascending label order.  The decode table is
    the same as in the three-party protocol.
    """
    if not 2 <= n_users <= 11:
        raise ValueError(f"n_users must be in [2, 11], got {n_users}")
    if not 1 <= receiver <= n_users:
        raise ValueError(f"receiver index must be in [1, {n_users}], got {receiver}")
    m = n_users + 1
    r_qubit = receiver + 1
    outcome, state = measure_bell(_encoded(op, m), 1, r_qubit, rng)
    bits = []
    # surviving qubits are the bystanders, in ascending original order
    for pos in range(1, m - 1):
        bit, state = measure_computational(state, pos, rng)
        bits.append(bit)
    decoded = decode_sdc(outcome, bits)
    status = SUCCESS if not any(bits) else ABORT
    return SdcTrial(op, f"user{receiver}", outcome, tuple(bits), status, decoded)


@cache
def analytic_success_probability(n_users: int = 2, receiver: int = 1) -> float:
    """Exact P(all bystander bits 0), computed from the state, not a formula.

    Identical for all four operations; equals 2/(n_users + 1).
    """
    m = n_users + 1
    r_qubit = receiver + 1
    values = []
    for op in PauliOp:
        total = 0.0
        state = _encoded(op, m)
        bystanders = [q for q in range(1, m + 1) if q not in (1, r_qubit)]
        n = state.n_qubits
        for idx, amp in enumerate(state.amps):
            if all((idx >> (n - q)) & 1 == 0 for q in bystanders):
                total += abs(amp) ** 2
        values.append(total)
    if max(values) - min(values) > 1e-12:
        raise AssertionError(f"success probability depends on the operation: {values}")
    return values[0]


# ---------------------------------------------------------------------------
# What each party can do alone.
# ---------------------------------------------------------------------------


def receiver_posterior(b: BellOutcome, receiver: Party = Party.BOB) -> dict[PauliOp, float]:
    """Posterior over operations given only the receiver's Bell outcome."""
    likes = {
        op: sum(p for (bb, _), p in joint_distribution(op, receiver).items() if bb == b)
        for op in PauliOp
    }
    total = sum(likes.values())
    return {op: v / total for op, v in likes.items()}


def bystander_posterior(bit: int, receiver: Party = Party.BOB) -> dict[PauliOp, float]:
    """Posterior given only the bystander's computational bit.

    The bit's distribution is identical across operations, so this is
    uniform and the lone bystander guesses at chance.
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    likes = {
        op: sum(p for (_, bt), p in joint_distribution(op, receiver).items() if bt == bit)
        for op in PauliOp
    }
    total = sum(likes.values())
    return {op: v / total for op, v in likes.items()}


def bob_alone_posterior(b: BellOutcome) -> dict[PauliOp, float]:
    return receiver_posterior(b, Party.BOB)


def bob_alone_guess(b: BellOutcome) -> PauliOp:
    return posterior_guess(bob_alone_posterior(b))


def charlie_alone_posterior(bit: int) -> dict[PauliOp, float]:
    return bystander_posterior(bit, Party.BOB)


def charlie_alone_guess(bit: int) -> PauliOp:
    return posterior_guess(charlie_alone_posterior(bit))


def _solo_accuracy(posteriors_by_obs: dict, obs_prob: dict) -> float:
    """Expected argmax-guess accuracy over a uniform secret."""
    acc = 0.0
    for obs, post in posteriors_by_obs.items():
        guess = posterior_guess(post)
        acc += obs_prob[obs] * post[guess]
    return acc


@cache
def analytic_receiver_solo_accuracy(receiver: Party = Party.BOB) -> float:
    obs_prob = {
        b: sum(
            0.25 * sum(p for (bb, _), p in joint_distribution(op, receiver).items() if bb == b)
            for op in PauliOp
        )
        for b in BellOutcome
    }
    posts = {b: receiver_posterior(b, receiver) for b in BellOutcome}
    return _solo_accuracy(posts, obs_prob)


@cache
def analytic_bystander_solo_accuracy(receiver: Party = Party.BOB) -> float:
    obs_prob = {
        bit: sum(
            0.25 * sum(p for (_, bt), p in joint_distribution(op, receiver).items() if bt == bit)
            for op in PauliOp
        )
        for bit in (0, 1)
    }
    posts = {bit: bystander_posterior(bit, receiver) for bit in (0, 1)}
    return _solo_accuracy(posts, obs_prob)


@dataclass(frozen=True)
class CheatReport:
    """Solo-guess accuracies and the complementary cheat probabilities."""

    receiver: str
    analytic: dict[str, float]
    monte_carlo: Optional[dict[str, float]]
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "receiver": self.receiver,
            "analytic": self.analytic,
            "monte_carlo": self.monte_carlo,
            "trials": self.trials,
            "seed": self.seed,
        }


def cheat_report(receiver: Party = Party.BOB, trials: int = 0, seed: int = 0) -> CheatReport:
    """Quantify the receiver / bystander asymmetry.

    A party's cheat succeeds exactly when the other party, left alone,
    fails to identify the operation.  ``trials > 0`` adds a seeded
    Monte Carlo cross-check of the analytic values.
    """
    recv_solo = analytic_receiver_solo_accuracy(receiver)
    byst_solo = analytic_bystander_solo_accuracy(receiver)
    if receiver == Party.BOB:
        analytic = {
            "bob_solo_accuracy": recv_solo,
            "charlie_solo_accuracy": byst_solo,
            "charlie_cheat_success": 1.0 - recv_solo,
            "bob_cheat_success": 1.0 - byst_solo,
        }
    else:
        analytic = {
            "bob_solo_accuracy": byst_solo,
            "charlie_solo_accuracy": recv_solo,
            "charlie_cheat_success": 1.0 - byst_solo,
            "bob_cheat_success": 1.0 - recv_solo,
        }

    mc = None
    if trials > 0:
        recv_hits = byst_hits = 0
        for i in range(trials):
            rng = stream(seed, i)
            op = random_op(rng)
            trial = run_sdc_round(op, rng, receiver)
            if posterior_guess(receiver_posterior(trial.bell_outcome, receiver)) == op:
                recv_hits += 1
            if posterior_guess(bystander_posterior(trial.bystander_bits[0], receiver)) == op:
                byst_hits += 1
        r, b = recv_hits / trials, byst_hits / trials
        if receiver == Party.BOB:
            mc = {
                "bob_solo_accuracy": r,
                "charlie_solo_accuracy": b,
                "charlie_cheat_success": 1.0 - r,
                "bob_cheat_success": 1.0 - b,
            }
        else:
            mc = {
                "bob_solo_accuracy": b,
                "charlie_solo_accuracy": r,
                "charlie_cheat_success": 1.0 - b,
                "bob_cheat_success": 1.0 - r,
            }
    return CheatReport(receiver.value, analytic, mc, trials, seed)


def conditional_bell_distribution(op: PauliOp, n_users: int = 2, receiver: int = 1) -> dict[BellOutcome, float]:
    """P(bell outcome | success) — a point mass for every operation."""
    m = n_users + 1
    state = _encoded(op, m)
    r_qubit = receiver + 1
    n = state.n_qubits
    bystanders = [q for q in range(1, m + 1) if q not in (1, r_qubit)]
    kept = np.array(
        [
            amp if all((idx >> (n - q)) & 1 == 0 for q in bystanders) else 0.0
            for idx, amp in enumerate(state.amps)
        ],
        dtype=np.complex128,
    )
    norm = np.linalg.norm(kept)
    projected = StateVector(n, kept / norm)
    dist = {}
    for outcome, p, _ in bell_project(projected, 1, r_qubit):
        dist[outcome] = p
    return dist
