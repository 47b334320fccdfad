"""Seeded Monte Carlo execution with analytic-vs-empirical comparison.

Every probability claim the simulator makes has two arms: an exact value
computed from the state, and a seeded trial estimate with a Wilson score
interval.  Trials draw from per-index counter-based streams, so the same
TrialConfig reproduces the same Statistics bit for bit regardless of
execution order.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from . import adversary as adv
from . import sdc
from .canon import PauliOp
from .qss import DeclarationPolicy, Party, posterior_guess, random_op, run_qss_round
from .streams import GENERATOR_NAME, stream

Z95 = 1.959963984540054
Z99 = 2.5758293035489004


@dataclass(frozen=True)
class TrialConfig:
    """Everything needed to reproduce one experiment."""

    protocol: str
    trials: int = 10000
    seed: int = 0
    check_fraction: float = 0.5
    n_users: int = 2
    receiver: str = "bob"
    policy: str = "random"
    model: str = "none"
    basis: str = "computational"
    coupling: str = "flip"
    target: str = "bob"
    op: Optional[str] = None  # fix the encoded operation; None = uniform

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Statistics:
    """Trial counts, the estimate with its 95% interval, and the exact value."""

    count: int
    successes: int
    estimate: float
    ci95_low: float
    ci95_high: float
    analytic: Optional[float]

    def to_dict(self) -> dict:
        return asdict(self)


def wilson_interval(successes: int, count: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; stays sane at proportions 0 and 1."""
    if count < 1:
        raise ValueError("need at least one trial")
    p = successes / count
    denom = 1.0 + z * z / count
    center = (p + z * z / (2 * count)) / denom
    margin = (z / denom) * math.sqrt(p * (1.0 - p) / count + z * z / (4 * count * count))
    return max(0.0, center - margin), min(1.0, center + margin)


@dataclass(frozen=True)
class ComparisonResult:
    passed: bool
    z_score: float
    p_value: float
    significance: float

    def to_dict(self) -> dict:
        return asdict(self)


def compare_analytic(s: Statistics, significance: float = 0.01) -> ComparisonResult:
    """Two-sided binomial z-test of the estimate against the exact value."""
    if s.analytic is None:
        raise ValueError("statistics carry no analytic value to compare against")
    p = min(max(s.analytic, 1e-12), 1.0 - 1e-12)
    se = math.sqrt(p * (1.0 - p) / s.count)
    z = (s.estimate - s.analytic) / se
    p_value = 2.0 * (1.0 - 0.5 * (1.0 + math.erf(abs(z) / math.sqrt(2.0))))
    return ComparisonResult(p_value >= significance, z, p_value, significance)


# ---------------------------------------------------------------------------
# Protocol dispatch.
# ---------------------------------------------------------------------------


def _op_for(cfg: TrialConfig, rng: np.random.Generator) -> PauliOp:
    return PauliOp(cfg.op) if cfg.op is not None else random_op(rng)


def _receiver_party(cfg: TrialConfig) -> Party:
    party = Party(cfg.receiver)
    if party == Party.ALICE:
        raise ValueError("the sender cannot be the receiver")
    return party


def _receiver_index(cfg: TrialConfig) -> int:
    try:
        return int(cfg.receiver)
    except ValueError:
        return {"bob": 1, "charlie": 2}[cfg.receiver]


def _qss_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    t = run_qss_round(_op_for(cfg, rng), rng, policy=DeclarationPolicy(cfg.policy))
    return t.decoded_op == t.encoded_op


def _sdc_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    t = sdc.run_sdc_round(_op_for(cfg, rng), rng, _receiver_party(cfg))
    return t.status == sdc.SUCCESS


def _sdc_n_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    t = sdc.run_sdc_n_party(cfg.n_users, _receiver_index(cfg), _op_for(cfg, rng), rng)
    return t.status == sdc.SUCCESS


def _receiver_solo_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    party = _receiver_party(cfg)
    op = _op_for(cfg, rng)
    t = sdc.run_sdc_round(op, rng, party)
    return posterior_guess(sdc.receiver_posterior(t.bell_outcome, party)) == op


def _bystander_solo_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    party = _receiver_party(cfg)
    op = _op_for(cfg, rng)
    t = sdc.run_sdc_round(op, rng, party)
    return posterior_guess(sdc.bystander_posterior(t.bystander_bits[0], party)) == op


def _model_for(cfg: TrialConfig) -> adv.AdversaryModel:
    return adv.AdversaryModel(cfg.model, Party(cfg.target), basis=cfg.basis, coupling=cfg.coupling)


def _check_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    return adv.check_round(_model_for(cfg), rng).verdict == "fail"


def _late_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    return adv.late_declarer_trial(DeclarationPolicy(cfg.policy), rng)


def _substitute_trial(cfg: TrialConfig, rng: np.random.Generator) -> bool:
    _, inconsistent = adv.substitute_round(rng)
    return inconsistent


_TrialFn = Callable[[TrialConfig, np.random.Generator], bool]

_PROTOCOLS: dict[str, tuple[_TrialFn, Callable[[TrialConfig], Optional[float]]]] = {
    "qss": (_qss_trial, lambda cfg: 1.0),
    "sdc": (_sdc_trial, lambda cfg: sdc.analytic_success_probability(2)),
    "sdc-n": (_sdc_n_trial, lambda cfg: sdc.analytic_success_probability(cfg.n_users, _receiver_index(cfg))),
    "sdc-receiver-solo": (
        _receiver_solo_trial,
        lambda cfg: sdc.analytic_receiver_solo_accuracy(_receiver_party(cfg)),
    ),
    "sdc-bystander-solo": (
        _bystander_solo_trial,
        lambda cfg: sdc.analytic_bystander_solo_accuracy(_receiver_party(cfg)),
    ),
    "check": (_check_trial, lambda cfg: adv.check_fail_probability(_model_for(cfg))),
    "late-declarer": (_late_trial, lambda cfg: adv.late_declarer_analytic(DeclarationPolicy(cfg.policy))),
    "substitute-qubit": (_substitute_trial, lambda cfg: adv.substitute_inconsistent_rate()),
}

PROTOCOLS = tuple(_PROTOCOLS)


def run_trials(cfg: TrialConfig) -> Statistics:
    """Run the configured experiment; deterministic given the config."""
    if cfg.protocol not in _PROTOCOLS:
        raise ValueError(f"unknown protocol {cfg.protocol!r}; expected one of {PROTOCOLS}")
    if cfg.trials < 1:
        raise ValueError("need at least one trial")
    trial_fn, analytic_fn = _PROTOCOLS[cfg.protocol]
    analytic = analytic_fn(cfg)
    successes = 0
    for i in range(cfg.trials):
        successes += trial_fn(cfg, stream(cfg.seed, i))
    estimate = successes / cfg.trials
    low, high = wilson_interval(successes, cfg.trials)
    return Statistics(cfg.trials, successes, estimate, low, high, analytic)


def report_envelope(command: str, cfg: TrialConfig | dict, version: str) -> dict:
    """Common header embedded in every emitted report."""
    config = cfg.to_dict() if isinstance(cfg, TrialConfig) else dict(cfg)
    return {
        "command": command,
        "config": config,
        "seed": config.get("seed"),
        "generator": GENERATOR_NAME,
        "version": version,
    }
