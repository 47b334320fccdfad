"""Command-line surface: run protocols, run attacks, verify tables, dump reports.

Every command is deterministic given --seed and emits JSON (default) or
CSV to standard output.  Exit codes: 0 success, 1 bad arguments, 2 a
statistical comparison failed, 3 a session aborted after a failed
security check.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional

from . import __version__
from . import adversary as adv
from . import bellmeas, harness, qss, sdc
from .canon import BellOutcome, PauliOp
from .qss import DeclarationPolicy, Party

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPARISON_FAILED = 2
EXIT_SESSION_ABORTED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on bad flags, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _emit_csv(header: list, rows: list[list]) -> None:
    writer = csv.writer(sys.stdout)
    writer.writerow(header)
    writer.writerows(rows)


def _args_config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "fn"}


def _envelope(command: str, cfg: harness.TrialConfig | dict) -> dict:
    return harness.report_envelope(command, cfg, __version__)


def _stats_payload(command: str, cfg: harness.TrialConfig) -> tuple[dict, int]:
    stats = harness.run_trials(cfg)
    comparison = harness.compare_analytic(stats)
    payload = _envelope(command, cfg)
    payload["statistics"] = stats.to_dict()
    payload["comparison"] = comparison.to_dict()
    code = EXIT_OK if comparison.passed else EXIT_COMPARISON_FAILED
    return payload, code


def _cmd_qss_run(args) -> int:
    policy = DeclarationPolicy(args.policy)
    model = None
    if args.adversary != "none":
        model = adv.AdversaryModel(args.adversary, Party(args.target), basis=args.basis, coupling=args.coupling)
    report = qss.run_qss_session(
        args.trials,
        check_fraction=args.check_fraction,
        adversary=model,
        seed=args.seed,
        policy=policy,
        collect_transcripts=args.csv,
    )
    if args.csv:
        rows = [
            [
                t.encoded_op.value,
                t.outcome_14.value,
                t.outcome_25.value,
                t.outcome_36.value,
                "->".join(p.value for p in t.declaration_order),
                t.decoded_op.value if t.decoded_op else "inconsistent",
            ]
            for t in report.transcripts
        ]
        _emit_csv(["encoded_op", "o14", "o25", "o36", "declaration_order", "decoded_op"], rows)
    else:
        payload = _envelope("qss-run", _args_config(args))
        payload["session"] = report.to_dict()
        _emit_json(payload)
    return EXIT_SESSION_ABORTED if report.aborted else EXIT_OK


def _cmd_qss_attack(args) -> int:
    if args.adversary == "late-declarer":
        report = adv.late_declarer_attack(DeclarationPolicy(args.policy), trials=args.trials, seed=args.seed)
        payload = _envelope("qss-attack", _args_config(args))
        payload["attack"] = report.to_dict()
        _emit_json(payload)
        return EXIT_OK
    if args.adversary == "substitute-qubit":
        report = adv.substitute_qubit_attack(rounds=args.trials, seed=args.seed)
        payload = _envelope("qss-attack", _args_config(args))
        payload["attack"] = report.to_dict()
        _emit_json(payload)
        return EXIT_OK
    # channel attacks: measure the per-round detection probability
    model = adv.AdversaryModel(args.adversary, Party(args.target), basis=args.basis, coupling=args.coupling)
    cfg = harness.TrialConfig(
        protocol="check",
        trials=args.trials,
        seed=args.seed,
        model=args.adversary,
        basis=args.basis,
        coupling=args.coupling,
        target=args.target,
    )
    stats = harness.run_trials(cfg)
    comparison = harness.compare_analytic(stats)
    payload = _envelope("qss-attack", cfg)
    payload["attack"] = {
        "model": args.adversary,
        "rounds": stats.count,
        "conclusive_rounds": stats.count,
        "failures": stats.successes,
        "detection_probability": stats.estimate,
        "ci95": [stats.ci95_low, stats.ci95_high],
        "analytic": stats.analytic,
        "session_detection_50_rounds": adv.session_detection_probability(model, 50),
    }
    payload["comparison"] = comparison.to_dict()
    _emit_json(payload)
    return EXIT_OK if comparison.passed else EXIT_COMPARISON_FAILED


def _cmd_sdc_run(args) -> int:
    cfg = harness.TrialConfig(
        protocol="sdc", trials=args.trials, seed=args.seed, receiver=args.receiver, op=args.op
    )
    if args.csv:
        rows = []
        for i in range(cfg.trials):
            rng = harness.stream(cfg.seed, i)
            op = PauliOp(cfg.op) if cfg.op else qss.random_op(rng)
            trial = sdc.run_sdc_round(op, rng, Party(cfg.receiver))
            rows.append(trial.csv_row(i))
        _emit_csv(sdc.CSV_HEADER, rows)
        return EXIT_OK
    payload, code = _stats_payload("sdc-run", cfg)
    _emit_json(payload)
    return code


def _cmd_sdc_cheat(args) -> int:
    report = sdc.cheat_report(Party(args.receiver), trials=args.trials, seed=args.seed)
    payload = _envelope("sdc-cheat", _args_config(args))
    payload["cheat"] = report.to_dict()
    code = EXIT_OK
    if report.monte_carlo is not None:
        checks = {}
        for key in ("bob_solo_accuracy", "charlie_solo_accuracy"):
            stats = harness.Statistics(
                count=report.trials,
                successes=round(report.monte_carlo[key] * report.trials),
                estimate=report.monte_carlo[key],
                ci95_low=0.0,
                ci95_high=1.0,
                analytic=report.analytic[key],
            )
            result = harness.compare_analytic(stats)
            checks[key] = result.to_dict()
            if not result.passed:
                code = EXIT_COMPARISON_FAILED
        payload["comparison"] = checks
    _emit_json(payload)
    return code


def _cmd_sdc_n(args) -> int:
    cfg = harness.TrialConfig(
        protocol="sdc-n",
        trials=args.trials,
        seed=args.seed,
        n_users=args.users,
        receiver=args.receiver,
        op=args.op,
    )
    if args.csv:
        rows = []
        for i in range(cfg.trials):
            rng = harness.stream(cfg.seed, i)
            op = PauliOp(cfg.op) if cfg.op else qss.random_op(rng)
            trial = sdc.run_sdc_n_party(cfg.n_users, int(args.receiver), op, rng)
            rows.append(trial.csv_row(i))
        _emit_csv(sdc.CSV_HEADER, rows)
        return EXIT_OK
    payload, code = _stats_payload("sdc-n", cfg)
    _emit_json(payload)
    return code


def _cmd_decomp_verify(args) -> int:
    report = bellmeas.verify_published_tables()
    payload = _envelope("decomp-verify", {"seed": args.seed})
    payload["report"] = report.to_dict()
    _emit_json(payload)
    return EXIT_OK


def _cmd_decode_table(args) -> int:
    if args.protocol == "qss":
        table = qss.qss_decode_table()
        keys = sorted(table, key=lambda t: (t[0].order, t[1].order, t[2].order))
        rows = [[k[0].value, k[1].value, k[2].value, table[k].value] for k in keys]
        header = ["o14", "o25", "o36", "op"]
    else:
        table = sdc.sdc_decode_table()
        keys = sorted(table, key=lambda b: b.order)
        rows = [[k.value, table[k].value] for k in keys]
        header = ["bell_outcome", "op"]
    if args.csv:
        _emit_csv(header, rows)
    else:
        payload = _envelope("decode-table", {"protocol": args.protocol, "seed": args.seed})
        payload["table"] = [dict(zip(header, row)) for row in rows]
        _emit_json(payload)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, trials: int = 10000) -> None:
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="csv", action="store_false", default=False, help="JSON output (default)")
    fmt.add_argument("--csv", dest="csv", action="store_true", help="CSV output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entshare", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qss-run", help="run a secret-sharing session")
    _add_common(p)
    p.add_argument("--check-fraction", type=float, default=0.5)
    p.add_argument("--adversary", choices=("none",) + adv.KINDS[1:], default="none")
    p.add_argument("--policy", choices=("fixed", "round-robin", "random"), default="random")
    p.add_argument("--target", choices=("bob", "charlie"), default="bob")
    p.add_argument("--basis", choices=adv.BASES, default="computational")
    p.add_argument("--coupling", choices=adv.COUPLINGS, default="flip")
    p.set_defaults(fn=_cmd_qss_run)

    p = sub.add_parser("qss-attack", help="run an attack model and report statistics")
    _add_common(p)
    p.add_argument("--adversary", choices=adv.KINDS[1:], required=True)
    p.add_argument("--policy", choices=("fixed", "round-robin", "random"), default="random")
    p.add_argument("--target", choices=("bob", "charlie"), default="bob")
    p.add_argument("--basis", choices=adv.BASES, default="computational")
    p.add_argument("--coupling", choices=adv.COUPLINGS, default="flip")
    p.set_defaults(fn=_cmd_qss_attack)

    p = sub.add_parser("sdc-run", help="run dense-coding rounds")
    _add_common(p)
    p.add_argument("--receiver", choices=("bob", "charlie"), default="bob")
    p.add_argument("--op", choices=[o.value for o in PauliOp], default=None)
    p.set_defaults(fn=_cmd_sdc_run)

    p = sub.add_parser("sdc-cheat", help="solo-cheat probabilities, exact and sampled")
    _add_common(p)
    p.add_argument("--receiver", choices=("bob", "charlie"), default="bob")
    p.set_defaults(fn=_cmd_sdc_cheat)

    p = sub.add_parser("sdc-n", help="multi-user dense coding")
    _add_common(p)
    p.add_argument("--users", type=int, default=3)
    p.add_argument("--receiver", default="1", help="1-based user index")
    p.add_argument("--op", choices=[o.value for o in PauliOp], default=None)
    p.set_defaults(fn=_cmd_sdc_n)

    p = sub.add_parser("decomp-verify", help="cross-check computed tables against the published ones")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_decomp_verify)

    p = sub.add_parser("decode-table", help="dump a generated decode table")
    p.add_argument("--protocol", choices=("qss", "sdc"), default="qss")
    p.add_argument("--seed", type=int, default=0)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="csv", action="store_false", default=False)
    fmt.add_argument("--csv", dest="csv", action="store_true")
    p.set_defaults(fn=_cmd_decode_table)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    except (ValueError, KeyError) as e:
        print(f"entshare: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())
