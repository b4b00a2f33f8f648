"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one ``ACCEPTANCE <n> PASS|FAIL`` line so the gate can be
read off the output directly (run with ``pytest -s tests/test_acceptance.py``
or check the captured output of a failing run).

Seeds are fixed so the whole suite is deterministic: the routing
experiment uses seeds 1..10, the sensitivity grid seeds 21..40.
"""

from __future__ import annotations

import json
import math
import time
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from itertools import combinations_with_replacement
from random import Random

import pytest

from delgov import experiments
from delgov.cli import demo_trace
from delgov.errors import default_semantics
from delgov.routing import DelegateRecord, RoutingPolicy, select
from delgov.stats import cohens_d, mann_whitney_u
from delgov.types import (
    Budget,
    ClaimType,
    DelegationContract,
    ErrorCategory,
    FailurePolicy,
    PolicyEnvelope,
    Provenance,
    QualityClaim,
    Severity,
    TaskResult,
    TaskSubmit,
    VerificationStatus,
)
from delgov.wire import decode_message, encode_message

UTC = timezone.utc
E3_SEEDS = list(range(1, 11))
GRID_SEEDS = list(range(21, 41))


def report(number: int, description: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" [{detail}]" if detail else ""
    print(f"ACCEPTANCE {number:>2} {status} {description}{suffix}")
    assert passed, f"criterion {number}: {description}{suffix}"


@pytest.fixture(scope="module")
def e3_runs():
    start = time.perf_counter()
    runs = [
        experiments.run_routing_conditions_detailed(seed, 100) for seed in E3_SEEDS
    ]
    return runs, time.perf_counter() - start


@pytest.fixture(scope="module")
def grid():
    start = time.perf_counter()
    cells = experiments.run_sensitivity(GRID_SEEDS, 100)
    return cells, time.perf_counter() - start


def _mean(values):
    return sum(values) / len(values)


def _per_condition(runs, condition, attr):
    return [
        getattr(next(r for r in run.reports if r.condition == condition), attr)
        for run in runs
    ]


def test_criterion_1_routing_reproduction(e3_runs):
    runs, elapsed = e3_runs
    blind_mean = _mean(_per_condition(runs, "blind", "quality_mean"))
    self_mean = _mean(_per_condition(runs, "self_claimed", "quality_mean"))
    attested_mean = _mean(_per_condition(runs, "attested", "quality_mean"))
    self_acc = _per_condition(runs, "self_claimed", "accuracy_pct")
    self_infl = _per_condition(runs, "self_claimed", "inflation_selected_pct")
    att_acc = _per_condition(runs, "attested", "accuracy_pct")
    att_infl = _per_condition(runs, "attested", "inflation_selected_pct")
    blind_acc_pooled = _mean(_per_condition(runs, "blind", "accuracy_pct"))

    checks = {
        "blind mean": 0.63 <= blind_mean <= 0.73,
        "self mean": 0.52 <= self_mean <= 0.58,
        "attested mean": 0.92 <= attested_mean <= 0.96,
        "self accuracy exactly 0": all(a == 0.0 for a in self_acc),
        "self inflation exactly 100": all(i == 100.0 for i in self_infl),
        "attested accuracy exactly 100": all(a == 100.0 for a in att_acc),
        "attested inflation exactly 0": all(i == 0.0 for i in att_infl),
        "blind accuracy in binomial band": 2.0 <= blind_acc_pooled <= 19.0,
        "runtime under 5s": elapsed < 5.0,
    }
    detail = (
        f"blind={blind_mean:.4f} self={self_mean:.4f} attested={attested_mean:.4f} "
        f"blind_acc={blind_acc_pooled:.1f}% runtime={elapsed:.2f}s"
    )
    report(1, "routing-condition reproduction", all(checks.values()),
           detail if all(checks.values()) else f"{detail}; failed: "
           + ", ".join(k for k, ok in checks.items() if not ok))


def test_criterion_2_effect_sizes(e3_runs):
    runs, _ = e3_runs
    d_self_blind = _mean(_per_condition(runs, "self_claimed", "d_vs_blind"))
    p_att_blind = max(_per_condition(runs, "attested", "p_vs_blind"))
    d_att_self = []
    for run in runs:
        by = {r.condition: r for r in run.runs}
        d_att_self.append(cohens_d(by["attested"].samples, by["self_claimed"].samples))
    d_att_self_mean = _mean(d_att_self)

    ok = (
        -1.3 <= d_self_blind <= -0.7
        and 7.0 <= d_att_self_mean <= 12.0
        and p_att_blind < 0.001
    )
    report(
        2,
        "effect sizes and rank-test significance",
        ok,
        f"d(self,blind)={d_self_blind:.3f} d(attested,self)={d_att_self_mean:.2f} "
        f"max p(attested,blind)={p_att_blind:.2e}",
    )


def test_criterion_3_paradox_ordering(e3_runs):
    runs, _ = e3_runs
    orderings = []
    for run in runs:
        by = {r.condition: r for r in run.reports}
        orderings.append(
            by["self_claimed"].quality_mean
            < by["blind"].quality_mean
            < by["attested"].quality_mean
        )
    report(
        3,
        "self-claimed < blind < attested in every seed",
        all(orderings),
        f"{sum(orderings)}/10 seeds ordered",
    )


def test_criterion_4_sensitivity_grid(grid):
    cells, elapsed = grid
    paradox_cells = [c for c in cells if c.paradox]
    zone_ok = all(
        c.dishonest_fraction >= 0.3 or c.inflation_level in ("medium", "high")
        for c in paradox_cells
    )
    dominance = all(
        c.attested_mean >= c.blind_mean and c.attested_mean >= c.self_claimed_mean
        for c in cells
    )
    checks = {
        "36 cells": len(cells) == 36,
        "paradox count in [6, 14]": 6 <= len(paradox_cells) <= 14,
        "paradox confined to its zone": zone_ok,
        "attested dominates everywhere": dominance,
        "runtime under 60s": elapsed < 60.0,
    }
    report(
        4,
        "sensitivity grid",
        all(checks.values()),
        f"paradox={len(paradox_cells)}/36 runtime={elapsed:.1f}s"
        + ("" if all(checks.values())
           else "; failed: " + ", ".join(k for k, ok in checks.items() if not ok)),
    )


def test_criterion_5_overhead():
    result = experiments.run_overhead(10_000)
    delta = result.bytes_with_contract - result.bytes_without_contract
    ok = (
        300 <= delta <= 1100
        and result.validation_ns_mean < 10_000
        and result.serialization_ns_mean < 100_000
    )
    report(
        5,
        "protocol overhead",
        ok,
        f"byte delta={delta} validation={result.validation_ns_mean / 1000:.2f}us "
        f"serialization={result.serialization_ns_mean / 1000:.2f}us",
    )


def _legacy_corpus():
    corpus = []
    for i in range(12):
        corpus.append({"task_id": f"legacy-s{i}", "payload": f"task payload {i}"})
    for i in range(10):
        corpus.append(
            {
                "task_id": f"legacy-r{i}",
                "output": f"result body {i}",
                "tokens_used": 100 * i,
                "cost_usd": f"0.{i:02d}1",
                "completed_at": f"2026-01-{i + 1:02d}T08:30:00Z",
            }
        )
    return corpus


def _random_message(rng: Random):
    def text(limit=24):
        alphabet = "abcdefghijklmnop qrstuvwxyz-_.0123456789é世界"
        return "".join(rng.choice(alphabet) for _ in range(rng.randrange(1, limit)))

    def instant():
        return datetime(2026, 1, 1, tzinfo=UTC) + timedelta(
            seconds=rng.randrange(0, 10**8), microseconds=rng.choice((0, rng.randrange(10**6)))
        )

    if rng.random() < 0.5:
        contract = None
        if rng.random() < 0.6:
            budget = None
            if rng.random() < 0.8:
                budget = Budget(
                    max_tokens=rng.choice((None, rng.randrange(1, 10**6))),
                    max_cost_usd=Decimal(rng.randrange(1, 10**5)) / 100,
                )
            contract = DelegationContract(
                contract_id=text(12),
                objective=text(),
                policy=PolicyEnvelope(
                    failure_policy=rng.choice(list(FailurePolicy)),
                    budget=budget,
                    safety_constraints=tuple(text(10) for _ in range(rng.randrange(0, 3))),
                    max_delegation_depth=rng.choice((None, rng.randrange(0, 8))),
                ),
                success_criteria=tuple(text(10) for _ in range(rng.randrange(0, 3))),
                deadline=rng.choice((None, instant())),
            )
        return TaskSubmit(task_id=text(12), payload=text(60), contract=contract)
    provenance = None
    if rng.random() < 0.5:
        provenance = Provenance(
            verification_status=rng.choice(list(VerificationStatus)),
            evidence_refs=tuple(text(8) for _ in range(rng.randrange(0, 3))),
            lineage=tuple(text(8) for _ in range(rng.randrange(1, 4))),
        )
    return TaskResult(
        task_id=text(12),
        output=text(60),
        tokens_used=rng.randrange(0, 10**7),
        cost_usd=Decimal(rng.randrange(0, 10**6)) / 100,
        completed_at=instant(),
        provenance=provenance,
    )


def test_criterion_6_backward_compatibility():
    corpus = _legacy_corpus()
    legacy_ok = True
    for doc in corpus:
        decoded = decode_message(json.dumps(doc))
        if isinstance(decoded, TaskSubmit) and decoded.contract is not None:
            legacy_ok = False
        if isinstance(decoded, TaskResult) and decoded.provenance is not None:
            legacy_ok = False

    rng = Random("backward-compat")
    roundtrip_ok = injection_ok = True
    injected_keys = ("future_field", "x_routing_hint", "schema_rev", "claim_type")
    for _ in range(1000):
        msg = _random_message(rng)
        wire = encode_message(msg)
        if decode_message(wire) != msg:
            roundtrip_ok = False
            break
        obj = json.loads(wire)
        for target in [obj] + [v for v in obj.values() if isinstance(v, dict)]:
            target[rng.choice(injected_keys)] = rng.choice(
                (None, True, 17, "soon", [1, 2], {"deep": "er"})
            )
        if decode_message(json.dumps(obj)) != msg:
            injection_ok = False
            break

    ok = len(corpus) >= 20 and legacy_ok and roundtrip_ok and injection_ok
    report(
        6,
        "backward compatibility and roundtrip stability",
        ok,
        f"corpus={len(corpus)} legacy={legacy_ok} roundtrip1000={roundtrip_ok} "
        f"injection={injection_ok}",
    )


def test_criterion_7_error_taxonomy():
    expected = {
        ErrorCategory.RUNTIME: (True, Severity.ERROR),
        ErrorCategory.TRANSPORT: (True, Severity.WARNING),
        ErrorCategory.POLICY: (False, Severity.FATAL),
        ErrorCategory.CAPABILITY: (False, Severity.ERROR),
        ErrorCategory.QUALITY: (False, Severity.WARNING),
        ErrorCategory.IDENTITY: (False, Severity.ERROR),
        ErrorCategory.SESSION: (True, Severity.ERROR),
    }
    table_ok = all(
        (default_semantics(cat).retryable, default_semantics(cat).severity) == row
        for cat, row in expected.items()
    )
    _, error, result = demo_trace()
    trace_ok = (
        error.category is ErrorCategory.POLICY
        and error.code == "CONTRACT_VIOLATED"
        and error.partial_output == result.output
    )
    report(
        7,
        "error taxonomy table and lifecycle trace",
        table_ok and trace_ok,
        f"table={table_ok} trace={trace_ok}",
    )


def test_criterion_8_statistics_oracles():
    def exact_u(a, b):
        u = 0.0
        for x in a:
            for y in b:
                if x > y:
                    u += 1.0
                elif x == y:
                    u += 0.5
        return u

    alphabet = (0, 1, 2, 3)
    # order never enters the statistic (it ranks the pooled values), so
    # enumerating multisets covers every sample up to permutation
    multisets = [
        list(m)
        for size in range(3, 7)
        for m in combinations_with_replacement(alphabet, size)
    ]
    u_ok = all(
        mann_whitney_u(a, b)[0] == exact_u(a, b) for a in multisets for b in multisets
    )

    hand_pairs = [
        ([1, 2, 3], [2, 3, 4], -1.0),
        ([2, 3, 4], [1, 2, 3], 1.0),
        ([1, 2, 3, 4], [5, 6, 7, 8], -4.0 * math.sqrt(0.6)),
        ([10, 14], [6, 8], math.sqrt(5.0)),
        ([1, 1, 2, 2], [1, 2], 0.0),
        ([1, 2, 3], [1, 2, 3], 0.0),
    ]
    d_ok = all(
        abs(cohens_d(a, b) - expected) <= 1e-12 for a, b, expected in hand_pairs
    )
    report(
        8,
        "statistics against brute-force oracles",
        u_ok and d_ok,
        f"u_pairs={len(multisets) ** 2} hand_d_pairs={len(hand_pairs)}",
    )


def test_criterion_9_filter_immunity():
    pool = experiments.build_pool_with_metadata(
        experiments.ROUTING_POOL, Random("immunity:pool")
    )[0]
    records = experiments.records_for_pool(pool)
    policy = RoutingPolicy.by_claims(
        experiments.EXPERIMENT_SKILL, ClaimType.ISSUER_ATTESTED
    )
    baseline = select(records, policy, Random(0))
    rng = Random("immunity:perturb")
    stable = True
    for _ in range(1000):
        perturbed = [
            DelegateRecord(
                record.delegate_id,
                (
                    QualityClaim(
                        skill=experiments.EXPERIMENT_SKILL,
                        value=rng.random(),
                        claim_type=ClaimType.SELF_CLAIMED,
                    ),
                    record.claims[1],
                ),
            )
            for record in records
        ]
        if select(perturbed, policy, Random(0)) != baseline:
            stable = False
            break
    report(
        9,
        "attested filtering immune to self-claim perturbations",
        stable,
        f"baseline={baseline} trials=1000",
    )
