"""Experiment harness: routing conditions, sensitivity grid, overhead bench.

Three experiments, all seeded and reproducible:

- Routing conditions: one pool, three routing strategies (blind,
  self_claimed, attested), N tasks each, summarized per condition with
  effect size and rank-test p-value against the blind baseline. Every
  delegate record carries both its self-reported claim and an
  issuer-attested claim equal to its true quality, so the conditions
  differ only in the router's minimum claim type.
- Sensitivity grid: 36 cells over dishonest fraction x inflation level x
  pool size, averaged over a seed list, with a paradox flag per cell
  (self_claimed mean strictly below blind mean).
- Overhead: canonical message byte sizes with and without a contract, and
  mean wall time for contract validation and message serialization.

Randomness discipline: every stream is an independent ``random.Random``
seeded with a readable string, so runs are reproducible byte for byte. In
the routing-condition experiment each condition owns independent selection
and noise streams, keeping the rank-test samples uncorrelated. The grid
instead reuses one noise stream across the three conditions of a cell
(common random numbers): noise cancels out of the comparison, which makes
the attested-dominance property hold pointwise instead of merely in
expectation. No cross-condition statistics are computed on the grid, so
nothing needs the independence.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal
from random import Random
from typing import Callable, Sequence

from .contracts import apply_policy, check_result
from .routing import DelegateRecord, RoutingPolicy, select
from .simulate import (
    DelegateProfile,
    PoolConfig,
    PoolMetadata,
    best_delegate,
    build_pool_with_metadata,
    execute_task,
    profile_record,
)
from .stats import cohens_d, descriptive, mann_whitney_u
from .types import (
    Budget,
    ClaimType,
    DelegationContract,
    FailurePolicy,
    PolicyEnvelope,
    QualityClaim,
    TaskResult,
    TaskSubmit,
)
from .wire import canonical_bytes, encode_message

EXPERIMENT_SKILL = "general"
ATTESTATION_ISSUER = "quality-bench"

CONDITIONS = ("blind", "self_claimed", "attested")

ROUTING_POOL = PoolConfig(
    pool_size=10,
    dishonest_fraction=0.3,
    inflation_range=(0.35, 0.45),
    q_true_range=(0.45, 0.95),
    noise_sigma=0.05,
)

GRID_FRACTIONS = (0.1, 0.3, 0.5, 0.7)
GRID_INFLATION = (
    ("low", (0.10, 0.15)),
    ("medium", (0.25, 0.35)),
    ("high", (0.40, 0.50)),
)
GRID_POOL_SIZES = (5, 10, 20)


@dataclass(frozen=True)
class ConditionReport:
    """One row of the routing-condition summary."""

    condition: str
    quality_mean: float
    quality_std: float
    accuracy_pct: float
    inflation_selected_pct: float
    d_vs_blind: float
    p_vs_blind: float
    std_defined: bool = True


@dataclass(frozen=True)
class GridCellReport:
    """One sensitivity-grid cell, averaged over seeds."""

    dishonest_fraction: float
    inflation_level: str
    pool_size: int
    blind_mean: float
    self_claimed_mean: float
    attested_mean: float
    paradox: bool


@dataclass(frozen=True)
class OverheadReport:
    """Protocol overhead measurements."""

    bytes_without_contract: int
    bytes_with_contract: int
    validation_ns_mean: float
    serialization_ns_mean: float


@dataclass(frozen=True)
class ConditionRun:
    """Raw per-task data for one condition."""

    condition: str
    samples: tuple[float, ...]
    selections: tuple[str, ...]


@dataclass(frozen=True)
class RoutingRun:
    """Everything one seeded routing-condition experiment produced."""

    seed: int
    tasks_per_condition: int
    pool: tuple[DelegateProfile, ...]
    metadata: PoolMetadata
    runs: tuple[ConditionRun, ...]
    reports: tuple[ConditionReport, ...]


def records_for_pool(
    pool: Sequence[DelegateProfile],
    with_attested_claims: bool = True,
) -> list[DelegateRecord]:
    """Router-facing records for a simulated pool.

    Every delegate advertises its self-reported quality. With
    ``with_attested_claims`` each record additionally carries an
    issuer-attested claim equal to the delegate's true quality: the issuer
    measured it rather than taking the delegate's word. The self_claimed
    experiment condition routes over records without attested claims,
    modelling a deployment where no attestation exists yet; the router
    itself always prefers the most trusted eligible claim, so leaving the
    attested claims in would quietly upgrade the condition.
    """
    records = []
    for profile in pool:
        claims = [
            QualityClaim(
                skill=EXPERIMENT_SKILL,
                value=profile.q_claimed,
                claim_type=ClaimType.SELF_CLAIMED,
            )
        ]
        if with_attested_claims:
            claims.append(
                QualityClaim(
                    skill=EXPERIMENT_SKILL,
                    value=profile.q_true,
                    claim_type=ClaimType.ISSUER_ATTESTED,
                    issuer=ATTESTATION_ISSUER,
                )
            )
        records.append(
            DelegateRecord(delegate_id=profile.delegate_id, claims=tuple(claims))
        )
    return records


def condition_policy(condition: str) -> RoutingPolicy:
    if condition == "blind":
        return RoutingPolicy.blind()
    if condition == "self_claimed":
        return RoutingPolicy.by_claims(EXPERIMENT_SKILL, ClaimType.SELF_CLAIMED)
    if condition == "attested":
        return RoutingPolicy.by_claims(EXPERIMENT_SKILL, ClaimType.ISSUER_ATTESTED)
    raise ValueError(f"unknown condition {condition!r}")


def run_condition(
    pool: Sequence[DelegateProfile],
    records: Sequence[DelegateRecord],
    condition: str,
    select_rng: Random,
    noise_rng: Random,
    tasks: int,
    noise_sigma: float,
) -> ConditionRun:
    """Route and execute ``tasks`` tasks under one condition."""
    policy = condition_policy(condition)
    by_id = {p.delegate_id: p for p in pool}
    samples: list[float] = []
    selections: list[str] = []
    for _ in range(tasks):
        delegate_id = select(records, policy, select_rng)
        outcome = execute_task(by_id[delegate_id], noise_rng, noise_sigma)
        samples.append(outcome.q_output)
        selections.append(delegate_id)
    return ConditionRun(condition=condition, samples=tuple(samples), selections=tuple(selections))


def _condition_report(
    run: ConditionRun,
    blind_samples: Sequence[float],
    best_id: str,
    dishonest_ids: frozenset[str],
) -> ConditionReport:
    n = len(run.samples)
    if n >= 2:
        mean, std = descriptive(run.samples)
        std_defined = True
    else:
        mean, std, std_defined = run.samples[0], 0.0, False
    accuracy = 100.0 * sum(1 for s in run.selections if s == best_id) / n
    inflated = 100.0 * sum(1 for s in run.selections if s in dishonest_ids) / n

    if run.condition == "blind":
        d, p = 0.0, 1.0
    else:
        d = cohens_d(run.samples, blind_samples) if n >= 2 and len(blind_samples) >= 2 else math.nan
        if n >= 3 and len(blind_samples) >= 3:
            _, p = mann_whitney_u(run.samples, blind_samples)
        else:
            p = math.nan
    return ConditionReport(
        condition=run.condition,
        quality_mean=mean,
        quality_std=std,
        accuracy_pct=accuracy,
        inflation_selected_pct=inflated,
        d_vs_blind=d,
        p_vs_blind=p,
        std_defined=std_defined,
    )


def run_routing_conditions_detailed(seed: int, tasks_per_condition: int) -> RoutingRun:
    """Run the three routing conditions on one seeded pool, keeping raw data."""
    if tasks_per_condition < 1:
        raise ValueError("tasks_per_condition must be >= 1")
    pool, metadata = build_pool_with_metadata(ROUTING_POOL, Random(f"{seed}:e3:pool"))
    full_records = records_for_pool(pool)
    self_only_records = records_for_pool(pool, with_attested_claims=False)
    best_id = best_delegate(pool)
    dishonest = frozenset(metadata.dishonest_ids)

    runs = tuple(
        run_condition(
            pool,
            self_only_records if condition == "self_claimed" else full_records,
            condition,
            select_rng=Random(f"{seed}:e3:{condition}:select"),
            noise_rng=Random(f"{seed}:e3:{condition}:noise"),
            tasks=tasks_per_condition,
            noise_sigma=ROUTING_POOL.noise_sigma,
        )
        for condition in CONDITIONS
    )
    blind_samples = runs[0].samples
    reports = tuple(
        _condition_report(run, blind_samples, best_id, dishonest) for run in runs
    )
    return RoutingRun(
        seed=seed,
        tasks_per_condition=tasks_per_condition,
        pool=tuple(pool),
        metadata=metadata,
        runs=runs,
        reports=reports,
    )


def run_e3(seed: int, tasks_per_condition: int) -> list[ConditionReport]:
    """Per-condition summary of the routing experiment for one seed."""
    return list(run_routing_conditions_detailed(seed, tasks_per_condition).reports)


def _grid_cell_config(fraction: float, inflation: tuple[float, float], size: int) -> PoolConfig:
    return PoolConfig(
        pool_size=size,
        dishonest_fraction=fraction,
        inflation_range=inflation,
        q_true_range=ROUTING_POOL.q_true_range,
        noise_sigma=ROUTING_POOL.noise_sigma,
    )


def run_sensitivity(
    seeds: Sequence[int],
    tasks_per_condition: int,
) -> list[GridCellReport]:
    """Run all 36 grid cells, averaging each condition mean over the seeds."""
    if not seeds:
        raise ValueError("run_sensitivity requires at least one seed")
    if tasks_per_condition < 1:
        raise ValueError("tasks_per_condition must be >= 1")
    cells: list[GridCellReport] = []
    for fraction in GRID_FRACTIONS:
        for level, inflation in GRID_INFLATION:
            for size in GRID_POOL_SIZES:
                config = _grid_cell_config(fraction, inflation, size)
                key = f"grid:{fraction!r}:{level}:{size}"
                totals = {condition: 0.0 for condition in CONDITIONS}
                for seed in seeds:
                    pool, _ = build_pool_with_metadata(config, Random(f"{seed}:{key}:pool"))
                    full_records = records_for_pool(pool)
                    self_only = records_for_pool(pool, with_attested_claims=False)
                    for condition in CONDITIONS:
                        # identical noise stream per condition: common random numbers
                        run = run_condition(
                            pool,
                            self_only if condition == "self_claimed" else full_records,
                            condition,
                            select_rng=Random(f"{seed}:{key}:select:{condition}"),
                            noise_rng=Random(f"{seed}:{key}:noise"),
                            tasks=tasks_per_condition,
                            noise_sigma=config.noise_sigma,
                        )
                        totals[condition] += math.fsum(run.samples) / len(run.samples)
                means = {c: totals[c] / len(seeds) for c in CONDITIONS}
                cells.append(
                    GridCellReport(
                        dishonest_fraction=fraction,
                        inflation_level=level,
                        pool_size=size,
                        blind_mean=means["blind"],
                        self_claimed_mean=means["self_claimed"],
                        attested_mean=means["attested"],
                        paradox=means["self_claimed"] < means["blind"],
                    )
                )
    return cells


# ---------------------------------------------------------------------------
# overhead benchmark


def canonical_contract() -> DelegationContract:
    """The fixed contract used by the overhead bench and the demo trace."""
    return DelegationContract(
        contract_id="ctr-7f3a9c2e51b84d06",
        objective="Summarize the attached quarterly earnings report for the executive brief",
        policy=PolicyEnvelope(
            failure_policy=FailurePolicy.FAIL_CLOSED,
            budget=Budget(max_tokens=6000, max_cost_usd=Decimal("0.05")),
            safety_constraints=("no speculative financial projections",),
            max_delegation_depth=2,
        ),
        success_criteria=("at most 300 words", "cover revenue and margin figures"),
        deadline=datetime(2026, 3, 15, 18, 0, 0, tzinfo=timezone.utc),
    )


_CANONICAL_PAYLOAD = (
    "Quarterly earnings report, fiscal Q3. Consolidated revenue reached 412.6 "
    "million across all operating segments, an increase of 9.4 percent year "
    "over year, driven primarily by subscription renewals in the enterprise "
    "tier and a one-time licensing settlement recognized in September. Gross "
    "margin expanded to 61.2 percent from 58.9 percent as infrastructure "
    "migration costs rolled off. Operating expenses grew 6.1 percent, with "
    "headcount flat and the increase concentrated in go-to-market programs. "
    "Free cash flow was 54.3 million against 41.0 million in the prior "
    "quarter. Deferred revenue ended the period at 198.2 million. Management "
    "raised full-year revenue guidance to a range of 1.63 to 1.66 billion and "
    "reiterated the operating margin target. Please produce the summary for "
    "the Monday executive brief and flag any figure that cannot be verified "
    "against the tables in the appendix."
)


def canonical_submit(with_contract: bool) -> TaskSubmit:
    return TaskSubmit(
        task_id="task-58c21f7d",
        payload=_CANONICAL_PAYLOAD,
        contract=canonical_contract() if with_contract else None,
    )


def canonical_result(tokens_used: int = 5400) -> TaskResult:
    return TaskResult(
        task_id="task-58c21f7d",
        output=(
            "Q3 revenue was 412.6M, up 9.4% year over year on enterprise "
            "renewals and a September licensing settlement. Gross margin rose "
            "to 61.2%; opex grew 6.1% on go-to-market spend with flat "
            "headcount. Free cash flow reached 54.3M and deferred revenue "
            "198.2M. Full-year guidance was raised to 1.63-1.66B with the "
            "margin target reiterated."
        ),
        tokens_used=tokens_used,
        cost_usd=Decimal("0.04"),
        completed_at=datetime(2026, 3, 15, 17, 10, 0, tzinfo=timezone.utc),
    )


def _time_loop(fn: Callable[[], object], warmup: int, iterations: int) -> float:
    for _ in range(warmup):
        fn()
    start = time.perf_counter_ns()
    for _ in range(iterations):
        fn()
    return (time.perf_counter_ns() - start) / iterations


def run_overhead(iterations: int) -> OverheadReport:
    """Measure byte and time overhead of the governance extensions.

    Byte sizes come from the canonical submission with and without its
    contract. Timings are loop means over a monotonic high-resolution
    clock with at least ten percent warm-up discarded; validation is timed
    on the accepted path (budget and deadline checks plus policy
    application).
    """
    if iterations < 1000:
        raise ValueError("iterations must be >= 1000 for stable means")
    bytes_without = len(encode_message(canonical_submit(False)))
    bytes_with = len(encode_message(canonical_submit(True)))

    contract = canonical_contract()
    result = canonical_result()
    received_at = datetime(2026, 3, 15, 17, 15, 0, tzinfo=timezone.utc)
    warmup = max(iterations // 10, 100)

    validation_ns = _time_loop(
        lambda: apply_policy(check_result(contract, result, received_at), result),
        warmup,
        iterations,
    )
    submit = canonical_submit(True)
    serialization_ns = _time_loop(lambda: encode_message(submit), warmup, iterations)
    return OverheadReport(
        bytes_without_contract=bytes_without,
        bytes_with_contract=bytes_with,
        validation_ns_mean=validation_ns,
        serialization_ns_mean=serialization_ns,
    )


# ---------------------------------------------------------------------------
# report output

CONDITION_CSV_COLUMNS = (
    "condition",
    "quality_mean",
    "quality_std",
    "accuracy_pct",
    "inflation_selected_pct",
    "d_vs_blind",
    "p_vs_blind",
    "std_defined",
)

GRID_CSV_COLUMNS = (
    "dishonest_fraction",
    "inflation_level",
    "pool_size",
    "blind_mean",
    "self_claimed_mean",
    "attested_mean",
    "paradox",
)

OVERHEAD_CSV_COLUMNS = (
    "bytes_without_contract",
    "bytes_with_contract",
    "validation_ns_mean",
    "serialization_ns_mean",
)


def _cell(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, columns: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_condition_csv(path: str, reports: Sequence[ConditionReport]) -> None:
    rows = [
        [getattr(report, column) for column in CONDITION_CSV_COLUMNS]
        for report in reports
    ]
    _write_csv(path, CONDITION_CSV_COLUMNS, rows)


def write_grid_csv(path: str, cells: Sequence[GridCellReport]) -> None:
    rows = [[getattr(cell, column) for column in GRID_CSV_COLUMNS] for cell in cells]
    _write_csv(path, GRID_CSV_COLUMNS, rows)


def write_overhead_csv(path: str, report: OverheadReport) -> None:
    _write_csv(
        path,
        OVERHEAD_CSV_COLUMNS,
        [[getattr(report, column) for column in OVERHEAD_CSV_COLUMNS]],
    )


def write_summary_json(path: str, payload: dict) -> None:
    """Wire-format summary document (canonical JSON plus trailing newline)."""
    with open(path, "wb") as fh:
        fh.write(canonical_bytes(payload) + b"\n")


def routing_summary(runs: Sequence[RoutingRun]) -> dict:
    """Wire-format summary across seeds, including both effect-size pairings.

    The attested condition is compared against both baselines because the
    two pairings answer different questions and differ by an order of
    magnitude: against blind the denominator is dominated by the spread of
    pool quality, against self_claimed it is just execution noise.
    """
    d_att_self: list[float] = []
    p_att_self: list[float] = []
    for run in runs:
        by_condition = {r.condition: r for r in run.runs}
        d_att_self.append(
            cohens_d(by_condition["attested"].samples, by_condition["self_claimed"].samples)
        )
        p_att_self.append(
            mann_whitney_u(
                by_condition["attested"].samples, by_condition["self_claimed"].samples
            )[1]
        )
    first = runs[0]
    return {
        "experiment": "routing_conditions",
        "seeds": [run.seed for run in runs],
        "tasks_per_condition": first.tasks_per_condition,
        "pool": [profile_record(p) for p in first.pool],
        "pool_metadata": {
            "dishonest_ids": list(first.metadata.dishonest_ids),
            "designated_top_id": first.metadata.designated_top_id,
            "dominance_guaranteed": first.metadata.dominance_guaranteed,
        },
        "reports": [
            {
                "seed": run.seed,
                **{column: getattr(report, column) for column in CONDITION_CSV_COLUMNS},
            }
            for run in runs
            for report in run.reports
        ],
        "d_attested_vs_self_claimed": d_att_self,
        "p_attested_vs_self_claimed": p_att_self,
    }
