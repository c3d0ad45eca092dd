"""Personality system: emotion perception and replan triggering, memory
filtering with capacity-limited blurring, daily insight, and the four-stage
character growth chain."""
from __future__ import annotations

from dataclasses import dataclass, field

from .character import CharacterStructure, PreferenceSet, validate_structure, with_growth
from .hashing import canonical_json
from .lmclient import LmClient, PromptKind, PromptRequest

EMOTION_LABELS = {1: "Despairing", 2: "Fearful", 3: "Anxious", 4: "Calm",
                  5: "Content", 6: "Happy", 7: "Excited"}
REPLAN_SPAN = 3
DEFAULT_MEMORY_CAPACITY = 30  # K
DEFAULT_BLUR_BATCH = 10  # B


@dataclass(frozen=True)
class EmotionState:
    category: int  # 1 (negative) .. 7 (positive)
    feeling: str
    day: int
    tick: int

    def to_dict(self) -> dict:
        return {"category": self.category, "feeling": self.feeling,
                "day": self.day, "tick": self.tick}

    @classmethod
    def from_dict(cls, d: dict) -> "EmotionState":
        return cls(category=d["category"], feeling=d["feeling"], day=d["day"], tick=d["tick"])


@dataclass
class ShortTermRecord:
    day: int
    tick: int
    action: str
    emotion: EmotionState

    def to_dict(self) -> dict:
        return {"day": self.day, "tick": self.tick, "action": self.action,
                "emotion": self.emotion.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ShortTermRecord":
        return cls(day=d["day"], tick=d["tick"], action=d["action"],
                   emotion=EmotionState.from_dict(d["emotion"]))


@dataclass
class LongTermRecord:
    day: int
    summary: str
    salience: str  # character dimension the memory matched
    blurred: bool = False
    day_span: tuple[int, int] | None = None  # for blurred condensations

    def to_dict(self) -> dict:
        d = {"day": self.day, "summary": self.summary, "salience": self.salience,
             "blurred": self.blurred}
        if self.day_span:
            d["day_span"] = list(self.day_span)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LongTermRecord":
        return cls(day=d["day"], summary=d["summary"], salience=d["salience"],
                   blurred=d["blurred"],
                   day_span=tuple(d["day_span"]) if d.get("day_span") else None)


@dataclass
class InsightRecord:
    day: int
    reflection: str

    def to_dict(self) -> dict:
        return {"day": self.day, "reflection": self.reflection}


@dataclass
class GrowthDelta:
    day: int
    state_diff: str
    traits_diff: str
    conflict_diff: str
    preference_diff: str
    old_revision: int
    new_revision: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def update_emotion(agent: str, action: str, structure: CharacterStructure,
                   previous: EmotionState | None, client: LmClient,
                   day: int, tick: int, feelings_enabled: bool = True) -> EmotionState:
    """Pick one of the seven categories with a first-person feeling for the
    just-executed action. With cognitive feelings ablated the raw category is
    still produced for logging but the subjective text is suppressed."""
    resp = client.complete(PromptRequest(
        kind=PromptKind.EMOTION_UPDATE,
        context={"action": action, "conflict": structure.conflict,
                 "previous": str(previous.category) if previous else "none"},
        agent_id=agent, day=day, tick=tick,
    ))
    category = int(resp.payload["category"])
    if not 1 <= category <= 7:
        category = max(1, min(7, category))  # clamp out-of-range backend output
    feeling = resp.payload["feeling"] if feelings_enabled else "-"
    return EmotionState(category=category, feeling=feeling, day=day, tick=tick)


def check_replan_trigger(prev: EmotionState | None, nxt: EmotionState) -> bool:
    """True iff the emotional shift spans at least 3 of the 7 categories."""
    if prev is None:
        return False
    return abs(nxt.category - prev.category) >= REPLAN_SPAN


def filter_memories(agent: str, short_term: list[ShortTermRecord],
                    structure: CharacterStructure, client: LmClient,
                    day: int) -> list[LongTermRecord]:
    """End-of-day subjective filtering: keep what resonates with traits and
    conflict, summarized in the agent's own voice."""
    if not short_term:
        return []
    records = [f"{r.action} ({r.emotion.feeling})" for r in short_term]
    resp = client.complete(PromptRequest(
        kind=PromptKind.MEMORY_FILTER,
        context={"records": canonical_json(records),
                 "traits": structure.traits, "conflict": structure.conflict},
        agent_id=agent, day=day, tick=0,
    ))
    out = []
    for kept in resp.payload["kept"]:
        idx = kept["index"]
        if 0 <= idx < len(records):
            out.append(LongTermRecord(day=day, summary=kept["summary"],
                                      salience=kept["salience"]))
    return out


def decay_memories(store: list[LongTermRecord], client: LmClient, agent: str, day: int,
                   capacity: int = DEFAULT_MEMORY_CAPACITY,
                   blur_batch: int = DEFAULT_BLUR_BATCH) -> list[LongTermRecord]:
    """Condense the oldest *blur_batch* records into one blurred record until
    the store fits the capacity; chronological order is preserved."""
    store = list(store)
    while len(store) > capacity:
        batch = store[:blur_batch]
        resp = client.complete(PromptRequest(
            kind=PromptKind.MEMORY_BLUR,
            context={"records": canonical_json([r.summary for r in batch])},
            agent_id=agent, day=day, tick=0,
        ))
        blurred = LongTermRecord(
            day=batch[-1].day, summary=resp.payload["summary"], salience="blurred",
            blurred=True, day_span=(batch[0].day, batch[-1].day))
        store = [blurred] + store[blur_batch:]
    return store


def generate_insight(agent: str, day_events: list[str], store: list[LongTermRecord],
                     structure: CharacterStructure, client: LmClient,
                     day: int) -> InsightRecord:
    """One holistic reflection per day, grounded in the full character structure."""
    resp = client.complete(PromptRequest(
        kind=PromptKind.INSIGHT,
        context={"events": canonical_json(day_events),
                 "memory": canonical_json([r.summary for r in store]),
                 "structure": structure.serialized(),
                 "day": str(day)},
        agent_id=agent, day=day, tick=0,
    ))
    return InsightRecord(day=day, reflection=resp.payload["reflection"])


class GrowthError(RuntimeError):
    pass


def grow_character(agent: str, insight: InsightRecord, day_summary: str,
                   structure: CharacterStructure, client: LmClient,
                   day: int) -> tuple[CharacterStructure, GrowthDelta]:
    """Four sequential stages — state, traits, conflict, preference — each
    consuming the previous stage's partially updated structure. Atomic: any
    stage failure leaves the old structure in force."""
    old = structure
    work = structure

    def stage(kind: PromptKind) -> dict:
        resp = client.complete(PromptRequest(
            kind=kind,
            context={"structure": work.serialized(),
                     "insight": insight.reflection,
                     "day_summary": day_summary},
            agent_id=agent, day=day, tick=0,
        ))
        return resp.payload

    from dataclasses import replace as _replace
    payload = stage(PromptKind.GROWTH_STATE)
    work = _replace(work, current_state=payload["current_state"])
    payload = stage(PromptKind.GROWTH_FEATURE)
    work = _replace(work, traits=payload["traits"])
    payload = stage(PromptKind.GROWTH_CONFLICT)
    work = _replace(work, conflict=payload["conflict"])
    payload = stage(PromptKind.GROWTH_PREFERENCE)
    new_pref = PreferenceSet.from_dict(payload["preference"])

    grown = with_growth(old, current_state=work.current_state, traits=work.traits,
                        conflict=work.conflict, preference=new_pref)
    report = validate_structure(grown, original=old)
    if report:
        raise GrowthError("growth produced invalid structure: " + "; ".join(report))
    delta = GrowthDelta(
        day=day,
        state_diff=_diff(old.current_state, grown.current_state),
        traits_diff=_diff(old.traits, grown.traits),
        conflict_diff=_diff(old.conflict, grown.conflict),
        preference_diff=_diff(canonical_json(old.preference.to_dict()),
                              canonical_json(grown.preference.to_dict())),
        old_revision=old.revision, new_revision=grown.revision)
    return grown, delta


def _diff(old: str, new: str) -> str:
    return "unchanged" if old == new else f"{old!r} -> {new!r}"
