"""Router tests: claim filtering, selection strategies, immunity."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delgov.routing import (
    DelegateRecord,
    NoEligibleDelegate,
    RoutingPolicy,
    eligible_claim,
    select,
)
from delgov.types import ClaimType, QualityClaim

UTC = timezone.utc
NOW = datetime(2026, 6, 1, 12, 0, 0, tzinfo=UTC)

# critical value of chi-squared with 9 degrees of freedom at alpha = 0.01
CHI2_9_CRIT_01 = 21.666


def claim(value, claim_type, skill="reasoning", issuer=None, observed_at=None):
    if claim_type is ClaimType.ISSUER_ATTESTED and issuer is None:
        issuer = "eval-service"
    return QualityClaim(
        skill=skill, value=value, claim_type=claim_type, issuer=issuer, observed_at=observed_at
    )


def policy(min_claim_type=ClaimType.SELF_CLAIMED, skill="reasoning", max_staleness=None):
    return RoutingPolicy.by_claims(skill, min_claim_type, max_staleness)


def test_self_claim_filtered_out_by_attested_minimum():
    record = DelegateRecord("d-a", (claim(0.95, ClaimType.SELF_CLAIMED),))
    assert eligible_claim(record, policy(ClaimType.ISSUER_ATTESTED), NOW) is None


def test_higher_trust_level_wins_even_with_lower_value():
    record = DelegateRecord(
        "d-a",
        (
            claim(0.95, ClaimType.SELF_CLAIMED),
            claim(0.85, ClaimType.EXTERNALLY_BENCHMARKED),
        ),
    )
    chosen = eligible_claim(record, policy(), NOW)
    assert chosen.claim_type is ClaimType.EXTERNALLY_BENCHMARKED
    assert chosen.value == 0.85


def test_skill_mismatch_yields_no_claim():
    record = DelegateRecord("d-a", (claim(0.9, ClaimType.SELF_CLAIMED, skill="code"),))
    assert eligible_claim(record, policy(skill="reasoning"), NOW) is None


def test_stale_claims_are_excluded():
    fresh = claim(0.7, ClaimType.RUNTIME_OBSERVED, observed_at=NOW - timedelta(days=2))
    stale = claim(
        0.9, ClaimType.EXTERNALLY_BENCHMARKED, observed_at=NOW - timedelta(days=40)
    )
    record = DelegateRecord("d-a", (fresh, stale))
    chosen = eligible_claim(record, policy(max_staleness=timedelta(days=7)), NOW)
    assert chosen is fresh


def test_undated_claims_pass_only_without_a_staleness_window():
    record = DelegateRecord("d-a", (claim(0.8, ClaimType.SELF_CLAIMED),))
    assert eligible_claim(record, policy(), NOW) is not None
    assert eligible_claim(record, policy(max_staleness=timedelta(days=7)), NOW) is None


def test_eligible_claim_rejects_blind_policies():
    record = DelegateRecord("d-a", (claim(0.8, ClaimType.SELF_CLAIMED),))
    with pytest.raises(ValueError):
        eligible_claim(record, RoutingPolicy.blind(), NOW)


def test_duplicate_claim_per_skill_and_type_is_rejected():
    with pytest.raises(ValueError):
        DelegateRecord(
            "d-a",
            (claim(0.8, ClaimType.SELF_CLAIMED), claim(0.9, ClaimType.SELF_CLAIMED)),
        )


def _pool(values_by_id, claim_type=ClaimType.SELF_CLAIMED):
    return [
        DelegateRecord(delegate_id, (claim(value, claim_type),))
        for delegate_id, value in values_by_id.items()
    ]


def test_by_claims_selects_the_argmax():
    pool = _pool({"d-a": 0.6, "d-b": 0.9, "d-c": 0.7})
    assert select(pool, policy(), Random(0), NOW) == "d-b"


def test_ties_break_to_the_smallest_id():
    pool = _pool({"d-c": 0.9, "d-a": 0.9, "d-b": 0.9})
    assert select(pool, policy(), Random(0), NOW) == "d-a"


def test_by_claims_never_touches_the_rng():
    pool = _pool({"d-a": 0.6, "d-b": 0.9})
    rng = Random(1234)
    state = rng.getstate()
    select(pool, policy(), rng, NOW)
    assert rng.getstate() == state


def test_delegates_without_eligible_claims_are_excluded():
    pool = _pool({"d-a": 0.99}) + _pool({"d-b": 0.5}, ClaimType.ISSUER_ATTESTED)
    assert select(pool, policy(ClaimType.ISSUER_ATTESTED), Random(0), NOW) == "d-b"


def test_no_eligible_delegate_raises():
    pool = _pool({"d-a": 0.99, "d-b": 0.5})
    with pytest.raises(NoEligibleDelegate):
        select(pool, policy(ClaimType.ISSUER_ATTESTED), Random(0), NOW)


def test_empty_pool_is_a_precondition_failure():
    with pytest.raises(ValueError):
        select([], RoutingPolicy.blind(), Random(0), NOW)


def test_blind_uniformity_chi_squared():
    pool = _pool({f"d-{i}": 0.5 for i in range(10)})
    rng = Random(20260601)
    counts = {record.delegate_id: 0 for record in pool}
    draws = 10000
    for _ in range(draws):
        counts[select(pool, RoutingPolicy.blind(), rng, NOW)] += 1
    expected = draws / len(pool)
    stat = sum((n - expected) ** 2 / expected for n in counts.values())
    assert stat < CHI2_9_CRIT_01


def test_attested_filter_is_immune_to_self_claim_perturbations():
    rng = Random(7)
    base = [
        DelegateRecord(
            f"d-{i}",
            (
                claim(rng.random(), ClaimType.SELF_CLAIMED),
                claim(0.1 * i, ClaimType.ISSUER_ATTESTED),
            ),
        )
        for i in range(10)
    ]
    attested_policy = policy(ClaimType.ISSUER_ATTESTED)
    baseline = select(base, attested_policy, Random(0), NOW)
    for _ in range(200):
        perturbed = [
            DelegateRecord(
                record.delegate_id,
                (claim(rng.random(), ClaimType.SELF_CLAIMED), record.claims[1]),
            )
            for record in base
        ]
        assert select(perturbed, attested_policy, Random(0), NOW) == baseline


@settings(max_examples=200, deadline=None)
@given(
    st.dictionaries(
        st.text(alphabet="abcdef", min_size=1, max_size=4).map(lambda s: "d-" + s),
        st.floats(min_value=0.0, max_value=1.0),
        min_size=1,
        max_size=8,
    )
)
def test_argmax_dominance(values_by_id):
    pool = _pool(values_by_id)
    best_value = max(values_by_id.values())
    strict = [d for d, v in values_by_id.items() if v == best_value]
    winner = select(pool, policy(), Random(0), NOW)
    if len(strict) == 1:
        assert winner == strict[0]
    else:
        assert winner == min(strict)
