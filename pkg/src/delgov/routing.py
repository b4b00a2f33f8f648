"""Trust-aware delegate selection.

Two strategies:

- ``blind``: uniform random choice over the pool, the uninformed baseline.
- ``by_claims``: deterministic argmax over quality-claim values, after
  filtering claims by skill, minimum claim type on the trust scale, and
  freshness. Delegates without an eligible claim are excluded entirely.

Filtering is a hard minimum trust level rather than a numeric weighting
scheme; a router that requires issuer_attested or better never reads
self-reported numbers at all, which is what makes it immune to claim
inflation.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from random import Random
from typing import Optional, Sequence

from .types import ClaimType, QualityClaim, trust_level


class Strategy(str, Enum):
    BLIND = "blind"
    BY_CLAIMS = "by_claims"


class NoEligibleDelegate(Exception):
    """No delegate in the pool has a claim passing the policy filters.

    Callers should relax the policy (lower min_claim_type, drop staleness)
    or fall back to blind routing.
    """


@dataclass(frozen=True)
class RoutingPolicy:
    """How to pick a delegate. Blind routing ignores every field but strategy."""

    strategy: Strategy
    min_claim_type: Optional[ClaimType] = None
    skill: Optional[str] = None
    max_staleness: Optional[timedelta] = None

    @classmethod
    def blind(cls) -> "RoutingPolicy":
        return cls(strategy=Strategy.BLIND)

    @classmethod
    def by_claims(
        cls,
        skill: str,
        min_claim_type: ClaimType = ClaimType.SELF_CLAIMED,
        max_staleness: Optional[timedelta] = None,
    ) -> "RoutingPolicy":
        return cls(
            strategy=Strategy.BY_CLAIMS,
            min_claim_type=min_claim_type,
            skill=skill,
            max_staleness=max_staleness,
        )


@dataclass(frozen=True)
class DelegateRecord:
    """A delegate and its advertised quality claims.

    At most one claim per (skill, claim_type) pair; a delegate may well
    hold different claim types for different skills.
    """

    delegate_id: str
    claims: tuple[QualityClaim, ...] = ()

    def __post_init__(self) -> None:
        claims = tuple(self.claims)
        object.__setattr__(self, "claims", claims)
        seen = set()
        for claim in claims:
            key = (claim.skill, claim.claim_type)
            if key in seen:
                raise ValueError(
                    f"delegate {self.delegate_id!r} has duplicate claim for "
                    f"skill {claim.skill!r} at type {claim.claim_type.value!r}"
                )
            seen.add(key)


def eligible_claim(
    record: DelegateRecord,
    policy: RoutingPolicy,
    now: Optional[datetime] = None,
) -> Optional[QualityClaim]:
    """The claim the router would read for this delegate, if any.

    Claims must match the policy skill, sit at or above the minimum claim
    type, and be fresh enough when a staleness window is set. Claims with
    no observation time pass only when no window is configured. Among the
    survivors the highest trust level wins, whatever its value.
    """
    if policy.strategy is not Strategy.BY_CLAIMS:
        raise ValueError("eligible_claim applies only to by_claims policies")
    if policy.skill is None or policy.min_claim_type is None:
        raise ValueError("by_claims policy requires both skill and min_claim_type")

    min_level = trust_level(policy.min_claim_type)
    best: Optional[QualityClaim] = None
    for claim in record.claims:
        if claim.skill != policy.skill:
            continue
        if trust_level(claim.claim_type) < min_level:
            continue
        if policy.max_staleness is not None:
            if claim.observed_at is None:
                continue
            if now is None:
                raise ValueError("freshness filtering requires a reference time")
            if now - claim.observed_at > policy.max_staleness:
                continue
        if best is None or trust_level(claim.claim_type) > trust_level(best.claim_type):
            best = claim
    return best


def select(
    pool: Sequence[DelegateRecord],
    policy: RoutingPolicy,
    rng: Random,
    now: Optional[datetime] = None,
) -> str:
    """Pick one delegate id from a non-empty pool.

    Blind draws uniformly from ``rng``. by_claims is a pure function of the
    pool and policy: the rng is never touched, and ties on claim value go
    to the lexicographically smallest delegate id so runs reproduce.
    """
    if not pool:
        raise ValueError("select requires a non-empty pool")
    if policy.strategy is Strategy.BLIND:
        return pool[rng.randrange(len(pool))].delegate_id

    ranked: list[tuple[float, str]] = []
    for record in pool:
        claim = eligible_claim(record, policy, now)
        if claim is not None:
            ranked.append((claim.value, record.delegate_id))
    if not ranked:
        raise NoEligibleDelegate(
            f"no delegate has an eligible {policy.skill!r} claim at "
            f"{policy.min_claim_type.value!r} or above"
        )
    best_value = max(value for value, _ in ranked)
    return min(delegate_id for value, delegate_id in ranked if value == best_value)
