"""Behavioral and personality change metrics over event logs.

Personality changefulness: mean absolute day-to-day change of the five
BFI score series. Behavioral changefulness: each day's plan is encoded as
a goal-count vector over the fixed goal taxonomy; the overall activity
level is the mean upper-triangular entry of the day-pair Euclidean
distance matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..character import BFI_ITEM_COUNTS, CharacterStructure
from ..environment import GOAL_TAGS
from ..kernel import RunConfig
from ..lmclient import LmClient, ScriptedBackend
from .bfi import administer_bfi, score_bfi

DIMENSION_ORDER = ("extraversion", "agreeableness", "conscientiousness",
                   "neuroticism", "openness")


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class ScoreSeries:
    """Per-dimension ordered daily score lists, equal length across dimensions."""
    series: dict  # dimension -> list of daily scores

    def __post_init__(self):
        lengths = {len(v) for v in self.series.values()}
        if len(lengths) > 1:
            raise ValueError("unequal day counts across dimensions")

    @property
    def days(self) -> int:
        return len(next(iter(self.series.values())))


def delta_overall(series: ScoreSeries) -> float:
    """Mean absolute consecutive-day change, averaged over the 5 dimensions."""
    n = series.days
    if n < 2:
        raise InsufficientDataError("need at least two days of scores")
    dims = list(series.series.values())
    total = sum(abs(s[i] - s[i + 1]) for s in dims for i in range(n - 1))
    return total / (len(dims) * (n - 1))


@dataclass(frozen=True)
class GoalCountVector:
    day: int
    counts: tuple[int, ...]  # over GOAL_TAGS, canonical order

    def __post_init__(self):
        if len(self.counts) != len(GOAL_TAGS):
            raise ValueError("count vector must cover the full goal taxonomy")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")


def goal_counts(records: list[dict], agent: str, day: int) -> GoalCountVector:
    """Goal counts of the agent's post-appointment plan of record for *day*."""
    plan = None
    for rec in records:
        if rec["agent"] == agent and rec["day"] == day and rec["type"] in ("plan", "plan_final"):
            if plan is None or rec["type"] == "plan_final":
                plan = rec["payload"]["plan"]
    if plan is None:
        raise InsufficientDataError(f"no plan record for {agent} on day {day}")
    counts = [0] * len(GOAL_TAGS)
    for entry in plan["entries"]:
        if entry["status"] in ("cancelled", "replanned"):
            continue
        if entry["goal"] in GOAL_TAGS:
            counts[GOAL_TAGS.index(entry["goal"])] += 1
    return GoalCountVector(day=day, counts=tuple(counts))


def euclid_distance(a: GoalCountVector, b: GoalCountVector) -> float:
    if len(a.counts) != len(b.counts):
        raise ValueError("goal axes differ")
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a.counts, b.counts)))


def distance_matrix(vectors: list[GoalCountVector]) -> list[list[float]]:
    n = len(vectors)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = euclid_distance(vectors[i], vectors[j])
    return d


def activity_level(d: list[list[float]]) -> float:
    """Mean of the strict upper triangle of a day-pair distance matrix."""
    n = len(d)
    if n < 2:
        raise InsufficientDataError("need at least two days")
    total = sum(d[i][j] for i in range(n - 1) for j in range(i + 1, n))
    return total / (n * (n - 1) / 2)


# -- log-level drivers --------------------------------------------------------

def structures_by_day(records: list[dict], agent: str) -> list[CharacterStructure]:
    """End-of-day structures for days 1..n (day 0's structure carried forward
    on days without a growth record)."""
    initial = None
    growth: dict[int, dict] = {}
    days = 0
    for rec in records:
        if rec["type"] == "char_init" and rec["agent"] == agent:
            initial = rec["payload"]["structure"]
        elif rec["type"] == "growth" and rec["agent"] == agent:
            growth[rec["day"]] = rec["payload"]["structure"]
        days = max(days, rec["day"])
    if initial is None:
        raise InsufficientDataError(f"no char_init record for {agent}")
    out = []
    current = initial
    for day in range(1, days + 1):
        current = growth.get(day, current)
        out.append(CharacterStructure.from_dict(current))
    return out


def agent_ids(records: list[dict]) -> list[str]:
    return sorted({r["agent"] for r in records if r["type"] == "char_init"})


def log_seed(records: list[dict]) -> int:
    for rec in records:
        if rec["type"] == "config":
            return RunConfig.from_dict(rec["payload"]["config"]).seed
    raise InsufficientDataError("no config record in log")


def score_series_from_log(records: list[dict], agent: str,
                          client: LmClient | None = None) -> ScoreSeries:
    """Administer the parallel-form BFI over the log's per-day structures."""
    if client is None:
        client = LmClient(backend=ScriptedBackend(log_seed(records)))
    structures = structures_by_day(records, agent)
    sheets = administer_bfi(agent, structures, client, day=1)
    scored = [score_bfi(s) for s in sheets]
    return ScoreSeries(series={
        dim: [s.vector.to_dict()[dim] for s in scored] for dim in BFI_ITEM_COUNTS})


def metrics_report(records: list[dict], client: LmClient | None = None) -> dict:
    """Per-agent Δ-overall, goal-distance matrices and activity levels."""
    days = max((r["day"] for r in records), default=0)
    report: dict = {"days": days, "agents": {}}
    for agent in agent_ids(records):
        vectors = [goal_counts(records, agent, day) for day in range(1, days + 1)]
        d = distance_matrix(vectors)
        series = score_series_from_log(records, agent, client=client)
        report["agents"][agent] = {
            "delta_overall": delta_overall(series) if days >= 2 else None,
            "score_series": {k: list(v) for k, v in sorted(series.series.items())},
            "goal_counts": [list(v.counts) for v in vectors],
            "distance_matrix": d,
            "activity_level": activity_level(d) if days >= 2 else None,
        }
    return report
