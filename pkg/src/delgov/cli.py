"""Command-line interface.

Commands:

- ``validate FILE...``: decode each wire document, print violations.
- ``check-contract CONTRACT RESULT``: validate a result against a
  contract and print the outcome (and error, if rejected) in wire format.
- ``e3``: run the three routing conditions and write the per-condition CSV.
- ``sensitivity``: run the 36-cell grid and write the per-cell CSV.
- ``bench``: measure protocol overhead and write the report CSV.
- ``demo-trace``: replay the contract lifecycle end to end on the
  canonical over-budget example and print each step.

Exit codes: 0 success, 1 malformed or invalid input, 2 bad arguments,
3 contract rejected (distinct so scripts can branch on fail_closed).

Every seeded command produces byte-identical output files for identical
arguments; ``bench`` output depends on the host clock by nature.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import experiments
from .contracts import (
    ValidationOutcome,
    apply_policy,
    check_depth,
    check_result,
    violation_record,
)
from .errors import default_semantics
from .types import LdpError, TaskResult, TaskSubmit
from .wire import (
    DecodeError,
    canonical_bytes,
    decode_any,
    decode_contract,
    decode_message,
    format_timestamp,
    ldp_error_to_wire,
    message_to_wire,
    parse_timestamp,
    validate_invariants,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_BAD_ARGS = 2
EXIT_REJECTED = 3


@dataclass(frozen=True)
class CliConfig:
    """Parsed invocation: which command plus its knobs."""

    command: str
    seed: int = 42
    tasks: int = 100
    seeds: tuple[int, ...] = ()
    iterations: int = 10000
    out_path: Optional[str] = None
    input_paths: tuple[str, ...] = ()
    received_at: Optional[datetime] = None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delgov",
        description="Governed delegation: validate protocol documents and run the experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="decode wire documents and report violations")
    p_validate.add_argument("inputs", nargs="+", metavar="FILE")

    p_check = sub.add_parser("check-contract", help="validate a result against a contract")
    p_check.add_argument("contract", metavar="CONTRACT_FILE")
    p_check.add_argument("result", metavar="RESULT_FILE")
    p_check.add_argument(
        "--received-at",
        default=None,
        help="RFC 3339 receipt time (defaults to the current time)",
    )

    p_e3 = sub.add_parser("e3", help="run the three routing conditions")
    p_e3.add_argument("--seed", type=int, default=42)
    p_e3.add_argument("--tasks", type=int, default=100)
    p_e3.add_argument("--out", default="e3.csv")

    p_sens = sub.add_parser("sensitivity", help="run the 36-cell sensitivity grid")
    p_sens.add_argument("--seed", type=int, default=42)
    p_sens.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_sens.add_argument("--tasks", type=int, default=100)
    p_sens.add_argument("--out", default="sensitivity.csv")

    p_bench = sub.add_parser("bench", help="measure protocol overhead")
    p_bench.add_argument("--iterations", type=int, default=10000)
    p_bench.add_argument("--out", default="bench.csv")

    sub.add_parser("demo-trace", help="replay the contract lifecycle on the canonical example")
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    seeds: tuple[int, ...] = ()
    if getattr(args, "seeds", None):
        try:
            seeds = tuple(int(part) for part in args.seeds.split(",") if part.strip())
        except ValueError:
            raise SystemExit(EXIT_BAD_ARGS)
    received_at = None
    if getattr(args, "received_at", None):
        received_at = parse_timestamp(args.received_at, "received_at")
    return CliConfig(
        command=args.command,
        seed=getattr(args, "seed", 42),
        tasks=getattr(args, "tasks", 100),
        seeds=seeds,
        iterations=getattr(args, "iterations", 10000),
        out_path=getattr(args, "out", None),
        input_paths=tuple(getattr(args, "inputs", ())) or tuple(
            p for p in (getattr(args, "contract", None), getattr(args, "result", None)) if p
        ),
        received_at=received_at,
    )


def _print_wire(obj: dict) -> None:
    print(canonical_bytes(obj).decode("utf-8"))


def _cmd_validate(config: CliConfig) -> int:
    status = EXIT_OK
    for path in config.input_paths:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            print(f"{path}: unreadable ({exc})", file=sys.stderr)
            status = EXIT_INVALID_INPUT
            continue
        try:
            decoded = decode_any(data)
        except DecodeError as exc:
            print(f"{path}: INVALID {exc}")
            status = EXIT_INVALID_INPUT
            continue
        violations = validate_invariants(decoded)
        if violations:
            for violation in violations:
                print(f"{path}: VIOLATION {violation}")
            status = EXIT_INVALID_INPUT
        else:
            print(f"{path}: OK {type(decoded).__name__}")
    return status


def _cmd_check_contract(config: CliConfig) -> int:
    contract_path, result_path = config.input_paths
    try:
        contract = decode_contract(Path(contract_path).read_bytes())
        message = decode_message(Path(result_path).read_bytes())
    except OSError as exc:
        print(f"unreadable input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except DecodeError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    if not isinstance(message, TaskResult):
        print("invalid input: RESULT_FILE does not hold a task result", file=sys.stderr)
        return EXIT_INVALID_INPUT

    received_at = config.received_at or datetime.now(timezone.utc)
    outcome = check_result(contract, message, received_at)
    violations = list(outcome.violations)
    if message.provenance is not None and message.provenance.lineage:
        depth = check_depth(contract, message.provenance)
        if depth is not None:
            violations.append(depth)
    outcome = ValidationOutcome.from_violations(violations, contract.policy.failure_policy)

    for violation in violations:
        record = violation_record(violation, contract.contract_id, message.task_id)
        print(canonical_bytes(record).decode("utf-8"), file=sys.stderr)

    resolved = apply_policy(outcome, message)
    _print_wire(
        {
            "disposition": outcome.disposition.value,
            "violations": [
                violation_record(v, contract.contract_id, message.task_id)
                for v in violations
            ],
        }
    )
    if isinstance(resolved, LdpError):
        _print_wire(ldp_error_to_wire(resolved))
        return EXIT_REJECTED
    return EXIT_OK


def _cmd_e3(config: CliConfig) -> int:
    run = experiments.run_routing_conditions_detailed(config.seed, config.tasks)
    out = Path(config.out_path)
    experiments.write_condition_csv(str(out), run.reports)
    experiments.write_summary_json(
        str(out.with_suffix(".json")), experiments.routing_summary([run])
    )
    with open(out.with_suffix(".pool.jsonl"), "wb") as fh:
        for profile in run.pool:
            fh.write(canonical_bytes(experiments.profile_record(profile)) + b"\n")
    print(f"{'condition':<14}{'quality':>18}{'accuracy%':>11}{'inflated%':>11}{'d':>9}{'p':>12}")
    for report in run.reports:
        quality = f"{report.quality_mean:.3f} +/- {report.quality_std:.3f}"
        print(
            f"{report.condition:<14}{quality:>18}{report.accuracy_pct:>11.1f}"
            f"{report.inflation_selected_pct:>11.1f}{report.d_vs_blind:>9.2f}"
            f"{report.p_vs_blind:>12.2g}"
        )
    print(f"wrote {out}, {out.with_suffix('.json')}, {out.with_suffix('.pool.jsonl')}")
    return EXIT_OK


def _cmd_sensitivity(config: CliConfig) -> int:
    seeds = config.seeds or (config.seed,)
    cells = experiments.run_sensitivity(list(seeds), config.tasks)
    out = Path(config.out_path)
    experiments.write_grid_csv(str(out), cells)
    paradox_cells = [c for c in cells if c.paradox]
    experiments.write_summary_json(
        str(out.with_suffix(".json")),
        {
            "experiment": "sensitivity",
            "seeds": list(seeds),
            "tasks_per_condition": config.tasks,
            "cells": [
                {column: getattr(cell, column) for column in experiments.GRID_CSV_COLUMNS}
                for cell in cells
            ],
            "paradox_count": len(paradox_cells),
        },
    )
    print(f"{len(cells)} cells, paradox in {len(paradox_cells)}")
    for cell in paradox_cells:
        print(
            f"  paradox: fraction={cell.dishonest_fraction} "
            f"inflation={cell.inflation_level} pool={cell.pool_size} "
            f"(self {cell.self_claimed_mean:.3f} < blind {cell.blind_mean:.3f})"
        )
    print(f"wrote {out}, {out.with_suffix('.json')}")
    return EXIT_OK


def _cmd_bench(config: CliConfig) -> int:
    report = experiments.run_overhead(config.iterations)
    out = Path(config.out_path)
    experiments.write_overhead_csv(str(out), report)
    experiments.write_summary_json(
        str(out.with_suffix(".json")),
        {
            "experiment": "overhead",
            "iterations": config.iterations,
            **{
                column: getattr(report, column)
                for column in experiments.OVERHEAD_CSV_COLUMNS
            },
        },
    )
    delta = report.bytes_with_contract - report.bytes_without_contract
    pct = 100.0 * delta / report.bytes_without_contract
    print(f"message bytes: {report.bytes_without_contract} bare, "
          f"{report.bytes_with_contract} with contract (+{delta}, +{pct:.0f}%)")
    print(f"validation:    {report.validation_ns_mean / 1000.0:.2f} us/result")
    print(f"serialization: {report.serialization_ns_mean / 1000.0:.2f} us/message")
    print(f"wrote {config.out_path}")
    return EXIT_OK


def demo_trace() -> tuple[list[str], LdpError, TaskResult]:
    """Replay the contract lifecycle on the canonical over-budget example.

    A fail_closed contract with a 6000-token budget meets a result that
    consumed 8200 tokens: the delegator detects the breach at receipt,
    rejects, and hands back a CONTRACT_VIOLATED error that preserves the
    delegate's output as partial_output.
    """
    steps: list[str] = []
    contract = experiments.canonical_contract()
    submit = TaskSubmit(
        task_id="task-58c21f7d",
        payload="Summarize the attached quarterly report.",
        contract=contract,
    )
    steps.append(
        f"submit: task {submit.task_id} with contract {contract.contract_id} "
        f"(max_tokens={contract.policy.budget.max_tokens}, "
        f"policy={contract.policy.failure_policy.value}, "
        f"deadline={format_timestamp(contract.deadline)})"
    )
    steps.append(f"submit wire bytes: {len(canonical_bytes(message_to_wire(submit)))}")

    result = experiments.canonical_result(tokens_used=8200)
    steps.append(
        f"result: task {result.task_id} completed at "
        f"{format_timestamp(result.completed_at)} using {result.tokens_used} tokens"
    )

    received_at = datetime(2026, 3, 15, 17, 15, 0, tzinfo=timezone.utc)
    outcome = check_result(contract, result, received_at)
    for violation in outcome.violations:
        steps.append(f"violation: {violation.detail}")
    steps.append(f"disposition: {outcome.disposition.value}")

    resolved = apply_policy(outcome, result)
    if not isinstance(resolved, LdpError):
        raise AssertionError("canonical over-budget trace must reject")
    semantics = default_semantics(resolved.category)
    steps.append(
        f"error: code={resolved.code} category={resolved.category.value} "
        f"severity={resolved.severity.value} retryable={resolved.retryable}"
    )
    steps.append(
        f"recovery: {semantics.action.kind.value} ({semantics.action.description})"
    )
    steps.append(f"partial_output preserved: {len(resolved.partial_output)} chars")
    return steps, resolved, result


def _cmd_demo_trace() -> int:
    steps, error, _ = demo_trace()
    for step in steps:
        print(step)
    _print_wire(ldp_error_to_wire(error))
    return EXIT_OK


def dispatch(config: CliConfig) -> int:
    """Run one parsed command and return its exit status."""
    if config.command == "validate":
        return _cmd_validate(config)
    if config.command == "check-contract":
        return _cmd_check_contract(config)
    if config.command == "e3":
        return _cmd_e3(config)
    if config.command == "sensitivity":
        return _cmd_sensitivity(config)
    if config.command == "bench":
        return _cmd_bench(config)
    if config.command == "demo-trace":
        return _cmd_demo_trace()
    return EXIT_BAD_ARGS


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_ARGS
    try:
        config = config_from_args(args)
    except DecodeError as exc:
        print(f"bad arguments: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_ARGS
    try:
        return dispatch(config)
    except ValueError as exc:
        # covers out-of-range knobs like --tasks 0 or --iterations 10
        print(f"bad arguments: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
