"""Descriptive statistics, Cohen's d, and the Mann-Whitney U test.

Cohen's d uses the pooled-variance form

    d = (mean_a - mean_b) / sqrt(((n_a-1) s_a^2 + (n_b-1) s_b^2) / (n_a+n_b-2))

and is signed (a minus b). The Mann-Whitney U statistic is the rank-sum
form U_a = R_a - n_a (n_a + 1) / 2 with midranks for ties; the two-sided
p-value uses the normal approximation with a continuity correction and the
tie-corrected variance. The approximation is meant for the sample sizes
the experiments use (around 100 per side); at tiny n it diverges from the
exact permutation distribution, which the tests document against a
brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class InsufficientData(ValueError):
    """Fewer samples than the statistic requires."""


@dataclass(frozen=True)
class ComparisonStats:
    """Two-sample summary: moments, effect size, and rank test."""

    mean_a: float
    mean_b: float
    std_a: float
    std_b: float
    cohens_d: float
    u_statistic: float
    p_value: float


def descriptive(samples: Sequence[float]) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (n-1 denominator)."""
    n = len(samples)
    if n < 2:
        raise InsufficientData(f"descriptive needs at least 2 samples (got {n})")
    mean = math.fsum(samples) / n
    var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    return mean, math.sqrt(var)


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    """Signed pooled-variance effect size of a versus b.

    Degenerate variance is handled by value: equal means with zero pooled
    spread give 0.0, unequal means give a signed infinity marker.
    """
    if len(a) < 2 or len(b) < 2:
        raise InsufficientData("cohens_d needs at least 2 samples per side")
    mean_a, std_a = descriptive(a)
    mean_b, std_b = descriptive(b)
    n_a, n_b = len(a), len(b)
    pooled = math.sqrt(
        ((n_a - 1) * std_a**2 + (n_b - 1) * std_b**2) / (n_a + n_b - 2)
    )
    diff = mean_a - mean_b
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        return math.copysign(math.inf, diff)
    return diff / pooled


def _midranks(values: Sequence[float]) -> tuple[list[float], list[int]]:
    """Ranks (1-based, ties averaged) aligned to input order, plus tie sizes."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    tie_sizes: list[int] = []
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # positions i..j (0-based) share the average of ranks i+1..j+1
        avg = (i + j + 2) / 2.0
        for pos in range(i, j + 1):
            ranks[order[pos]] = avg
        tie_sizes.append(j - i + 1)
        i = j + 1
    return ranks, tie_sizes


def _normal_sf(x: float) -> float:
    """Survival function of the standard normal."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """U statistic for sample a and the two-sided approximate p-value.

    Identities that always hold: U_a + U_b = n_a * n_b, and U_a equals the
    count of (a_i, b_j) pairs with a_i > b_j plus half the ties.
    """
    n_a, n_b = len(a), len(b)
    if n_a < 3 or n_b < 3:
        raise InsufficientData("mann_whitney_u needs at least 3 samples per side")
    ranks, tie_sizes = _midranks(list(a) + list(b))
    r_a = math.fsum(ranks[:n_a])
    u_a = r_a - n_a * (n_a + 1) / 2.0

    n = n_a + n_b
    tie_term = math.fsum(t**3 - t for t in tie_sizes)
    variance = (n_a * n_b / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0.0:
        # every value tied with every other: no evidence either way
        return u_a, 1.0

    mu = n_a * n_b / 2.0
    diff = u_a - mu
    correction = 0.5 * (1 if diff > 0 else -1 if diff < 0 else 0)
    z = (diff - correction) / math.sqrt(variance)
    p = min(1.0, 2.0 * _normal_sf(abs(z)))
    return u_a, p


def compare(a: Sequence[float], b: Sequence[float]) -> ComparisonStats:
    """Full two-sample comparison of a versus b."""
    mean_a, std_a = descriptive(a)
    mean_b, std_b = descriptive(b)
    u, p = mann_whitney_u(a, b)
    return ComparisonStats(
        mean_a=mean_a,
        mean_b=mean_b,
        std_a=std_a,
        std_b=std_b,
        cohens_d=cohens_d(a, b),
        u_statistic=u,
        p_value=p,
    )
