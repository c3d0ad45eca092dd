"""Nonparametric statistics for group comparisons.

Self-contained implementations (no scipy at runtime): Wilcoxon signed-rank
with exact enumeration-equivalent p for small samples, Cohen's d,
Kruskal-Wallis with tie correction, and Dunn's pairwise test with
Holm-Bonferroni adjustment. Chi-square tail probabilities come from a
regularized incomplete gamma evaluated by series/continued fraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

EXACT_WILCOXON_MAX_N = 25


class DegenerateDataError(ValueError):
    pass


@dataclass(frozen=True)
class StatTestResult:
    statistic: float
    p_value: float
    method: str
    p_adjusted: float | None = None
    extra: dict = field(default_factory=dict)


# -- distribution tails -------------------------------------------------------

def normal_sf(z: float) -> float:
    """P(Z > z) for standard normal."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _gamma_p_series(a: float, x: float) -> float:
    # Lower regularized incomplete gamma by series expansion (x < a + 1).
    term = 1.0 / a
    total = term
    n = a
    for _ in range(500):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _gamma_q_contfrac(a: float, x: float) -> float:
    # Upper regularized incomplete gamma by Lentz continued fraction (x >= a + 1).
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x)."""
    if x < 0 or a <= 0:
        raise ValueError("gamma_q requires x >= 0, a > 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def chi2_sf(x: float, df: int) -> float:
    """Chi-square survival function P(X > x)."""
    if x <= 0:
        return 1.0
    return gamma_q(df / 2.0, x / 2.0)


# -- ranking helpers ----------------------------------------------------------

def _average_ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_groups(values: list[float]) -> list[int]:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return [c for c in counts.values() if c > 1]


# -- Wilcoxon signed-rank -----------------------------------------------------

def wilcoxon_signed_rank(samples: list[float], hypothesized_median: float = 0.0) -> StatTestResult:
    """Two-sided one-sample test; zeros dropped, ties get average ranks.

    T = min(W+, W-). Exact p (equivalent to enumerating all 2^n sign
    assignments) for n <= 25, normal approximation with tie correction above.
    """
    diffs = [x - hypothesized_median for x in samples if x != hypothesized_median]
    n = len(diffs)
    if n == 0:
        raise DegenerateDataError("all differences are zero")
    ranks = _average_ranks([abs(d) for d in diffs])
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    t_stat = min(w_plus, w_minus)
    if n <= EXACT_WILCOXON_MAX_N:
        p = _wilcoxon_exact_p(ranks, w_plus)
        method = "wilcoxon-exact"
    else:
        mean = n * (n + 1) / 4.0
        ties = _tie_groups([abs(d) for d in diffs])
        var = n * (n + 1) * (2 * n + 1) / 24.0 - sum(t ** 3 - t for t in ties) / 48.0
        if var <= 0:
            raise DegenerateDataError("zero variance in rank sum")
        z = (w_plus - mean) / math.sqrt(var)
        p = min(1.0, 2.0 * normal_sf(abs(z)))
        method = "wilcoxon-normal"
    return StatTestResult(statistic=t_stat, p_value=p, method=method,
                          extra={"n": n, "w_plus": w_plus, "w_minus": w_minus})


def _wilcoxon_exact_p(ranks: list[float], w_plus: float) -> float:
    # Distribution of W+ over equiprobable sign assignments, via a counting
    # DP on doubled ranks (doubling makes averaged tie ranks integral).
    doubled = [round(2 * r) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for d in doubled:
        for s in range(total - d, -1, -1):
            if counts[s]:
                counts[s + d] += counts[s]
    observed = round(2 * w_plus)
    denom = float(2 ** len(ranks))
    lower = sum(counts[: observed + 1]) / denom
    upper = sum(counts[observed:]) / denom
    return min(1.0, 2.0 * min(lower, upper))


# -- Cohen's d ----------------------------------------------------------------

def cohens_d(group_a: list[float], group_b: list[float]) -> float:
    """Standardized mean difference with the pooled standard deviation."""
    na, nb = len(group_a), len(group_b)
    if na < 2 or nb < 2:
        raise ValueError("each group needs at least two values")
    mean_a = sum(group_a) / na
    mean_b = sum(group_b) / nb
    ss_a = sum((x - mean_a) ** 2 for x in group_a)
    ss_b = sum((x - mean_b) ** 2 for x in group_b)
    pooled_var = (ss_a + ss_b) / (na + nb - 2)
    if pooled_var == 0:
        raise DegenerateDataError("zero pooled variance")
    return (mean_a - mean_b) / math.sqrt(pooled_var)


# -- Kruskal-Wallis -----------------------------------------------------------

def kruskal_wallis(groups: list[list[float]]) -> StatTestResult:
    """H with tie correction; p from chi-square with k - 1 df."""
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    if len(set(pooled)) < 2:
        raise DegenerateDataError("all values identical")
    ranks = _average_ranks(pooled)
    h = 0.0
    pos = 0
    for g in groups:
        r_sum = sum(ranks[pos:pos + len(g)])
        pos += len(g)
        h += r_sum ** 2 / len(g)
    h = 12.0 / (n * (n + 1)) * h - 3 * (n + 1)
    ties = _tie_groups(pooled)
    correction = 1.0 - sum(t ** 3 - t for t in ties) / float(n ** 3 - n)
    if correction <= 0:
        raise DegenerateDataError("tie correction collapsed to zero")
    h /= correction
    df = len(groups) - 1
    return StatTestResult(statistic=h, p_value=chi2_sf(h, df), method="kruskal-wallis",
                          extra={"df": df})


# -- Dunn with Holm-Bonferroni ------------------------------------------------

def holm_adjust(p_values: list[float]) -> list[float]:
    """Holm step-down adjustment: non-decreasing in raw-p order, capped at 1."""
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p_values[idx])
        adjusted[idx] = min(1.0, running)
    return adjusted


def dunn_posthoc_holm(groups: list[list[float]],
                      labels: list[str] | None = None) -> list[StatTestResult]:
    """Pairwise z from rank means with tie correction; two-sided raw p from
    the normal tail, then Holm-adjusted across all pairs."""
    k = len(groups)
    if k < 2:
        raise ValueError("need at least two groups")
    labels = labels or [f"group{i + 1}" for i in range(k)]
    pooled = [v for g in groups for v in g]
    n = len(pooled)
    ranks = _average_ranks(pooled)
    mean_ranks = []
    pos = 0
    for g in groups:
        mean_ranks.append(sum(ranks[pos:pos + len(g)]) / len(g))
        pos += len(g)
    ties = _tie_groups(pooled)
    tie_term = sum(t ** 3 - t for t in ties) / (12.0 * (n - 1))
    base_var = n * (n + 1) / 12.0 - tie_term
    results = []
    raws = []
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            se = math.sqrt(base_var * (1.0 / len(groups[i]) + 1.0 / len(groups[j])))
            if se == 0:
                raise DegenerateDataError("zero standard error in Dunn test")
            z = (mean_ranks[i] - mean_ranks[j]) / se
            raws.append(min(1.0, 2.0 * normal_sf(abs(z))))
            pairs.append((i, j, z))
    adjusted = holm_adjust(raws)
    for (i, j, z), raw, adj in zip(pairs, raws, adjusted):
        results.append(StatTestResult(
            statistic=z, p_value=raw, p_adjusted=adj, method="dunn-holm",
            extra={"pair": (labels[i], labels[j])}))
    return results
