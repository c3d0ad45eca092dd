"""Five-dimension character structure: creation, validation, summarization.

The structure (basic info, current state, traits, conflict, preference) is
the single personality record every other part of the engine reads. Values
are immutable; growth produces a new structure with a bumped revision.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .hashing import canonical_json
from .lmclient import LmClient, PromptKind, PromptRequest

# BFI-44 item counts per dimension; Likert sums live in [count, 5*count].
BFI_ITEM_COUNTS = {
    "openness": 10,
    "conscientiousness": 9,
    "extraversion": 8,
    "agreeableness": 9,
    "neuroticism": 8,
}

DIMENSIONS = ("basic_info", "current_state", "traits", "conflict", "preference")

DEFAULT_SUMMARY_BUDGET = 60  # words per dimension


@dataclass(frozen=True)
class BigFiveVector:
    openness: int
    conscientiousness: int
    extraversion: int
    agreeableness: int
    neuroticism: int

    def violations(self) -> list[str]:
        out = []
        for dim, count in BFI_ITEM_COUNTS.items():
            value = getattr(self, dim)
            if not count <= value <= 5 * count:
                out.append(f"{dim} score {value} outside [{count}, {5 * count}]")
        return out

    def to_dict(self) -> dict:
        return {
            "openness": self.openness,
            "conscientiousness": self.conscientiousness,
            "extraversion": self.extraversion,
            "agreeableness": self.agreeableness,
            "neuroticism": self.neuroticism,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BigFiveVector":
        return cls(**{k: int(d[k]) for k in BFI_ITEM_COUNTS})


@dataclass(frozen=True)
class PreferenceSet:
    ultimate_goal: str
    long_term_goal: str
    short_term_goal: str
    daily_routine: str
    hobbies: tuple[str, ...]
    venue_preference: tuple[str, ...]

    def violations(self) -> list[str]:
        out = []
        for name in ("ultimate_goal", "long_term_goal", "short_term_goal", "daily_routine"):
            if not getattr(self, name).strip():
                out.append(f"preference.{name} empty")
        if not self.hobbies:
            out.append("preference.hobbies empty")
        if not self.venue_preference:
            out.append("preference.venue_preference empty")
        if self.ultimate_goal:
            for name in ("long_term_goal", "short_term_goal"):
                if self.ultimate_goal not in getattr(self, name):
                    out.append(f"preference.{name} does not name the ultimate goal")
        return out

    def to_dict(self) -> dict:
        return {
            "ultimate_goal": self.ultimate_goal,
            "long_term_goal": self.long_term_goal,
            "short_term_goal": self.short_term_goal,
            "daily_routine": self.daily_routine,
            "hobbies": list(self.hobbies),
            "venue_preference": list(self.venue_preference),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreferenceSet":
        return cls(
            ultimate_goal=d["ultimate_goal"],
            long_term_goal=d["long_term_goal"],
            short_term_goal=d["short_term_goal"],
            daily_routine=d["daily_routine"],
            hobbies=tuple(d["hobbies"]),
            venue_preference=tuple(d["venue_preference"]),
        )


@dataclass(frozen=True)
class CharacterStructure:
    basic_info: dict  # name, gender, age, profession; immutable after init
    current_state: str
    traits: str
    conflict: str
    preference: PreferenceSet
    revision: int = 0
    big_five: BigFiveVector | None = None  # filled only by BFI assessment

    @property
    def name(self) -> str:
        return self.basic_info.get("name", "")

    def to_dict(self) -> dict:
        d = {
            "basic_info": dict(self.basic_info),
            "current_state": self.current_state,
            "traits": self.traits,
            "conflict": self.conflict,
            "preference": self.preference.to_dict(),
            "revision": self.revision,
        }
        if self.big_five is not None:
            d["big_five"] = self.big_five.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CharacterStructure":
        return cls(
            basic_info=dict(d["basic_info"]),
            current_state=d["current_state"],
            traits=d["traits"],
            conflict=d["conflict"],
            preference=PreferenceSet.from_dict(d["preference"]),
            revision=int(d["revision"]),
            big_five=BigFiveVector.from_dict(d["big_five"]) if d.get("big_five") else None,
        )

    def serialized(self) -> str:
        return canonical_json(self.to_dict())


@dataclass(frozen=True)
class CharacterSummary:
    dimensions: dict  # dimension name -> condensed text
    source_revision: int
    persona: str = ""  # set only under the simple-character ablation

    def text(self) -> str:
        if self.persona:
            return self.persona
        return " | ".join(f"{k}: {v}" for k, v in sorted(self.dimensions.items()))


class SchemaError(RuntimeError):
    pass


def init_character(brief: str, client: LmClient, agent_id: str = "", retries: int = 2) -> CharacterStructure:
    """Create a fresh structure (revision 0) from a short seed brief."""
    if not brief.strip():
        raise ValueError("empty character brief")
    last_err: Exception | None = None
    for _ in range(retries + 1):
        resp = client.complete(PromptRequest(
            kind=PromptKind.CHAR_INIT,
            context={"brief": brief},
            agent_id=agent_id or brief,
            day=0,
            tick=0,
        ))
        try:
            return _structure_from_payload(resp.payload)
        except (KeyError, TypeError) as exc:
            last_err = exc
    raise SchemaError(f"character init payload invalid after retries: {last_err}")


def _structure_from_payload(payload: dict) -> CharacterStructure:
    cs = CharacterStructure(
        basic_info=dict(payload["basic_info"]),
        current_state=payload["current_state"],
        traits=payload["traits"],
        conflict=payload["conflict"],
        preference=PreferenceSet.from_dict(payload["preference"]),
        revision=0,
    )
    report = validate_structure(cs)
    if report:
        raise SchemaError("invalid structure from backend: " + "; ".join(report))
    return cs


def _truncate_words(text: str, budget: int) -> str:
    words = text.split()
    return " ".join(words[:budget])


def summarize_character(
    full: CharacterStructure,
    client: LmClient,
    emphasis: str | None = None,
    budget: int = DEFAULT_SUMMARY_BUDGET,
    agent_id: str = "",
    day: int = 0,
    simple: bool = False,
) -> CharacterSummary:
    """Condense every dimension to *budget* words; *emphasis* is kept verbatim.

    With ``simple=True`` the five dimensions collapse into one persona
    paragraph (the simplified-character control condition).
    """
    if emphasis is not None and emphasis not in DIMENSIONS:
        raise ValueError(f"unknown dimension {emphasis!r}")
    resp = client.complete(PromptRequest(
        kind=PromptKind.CHAR_SUMMARY,
        context={"structure": full.serialized(), "emphasis": emphasis or "", "budget": str(budget)},
        agent_id=agent_id or full.name,
        day=day,
        tick=0,
    ))
    dims = dict(resp.payload["dimensions"])
    full_texts = _dimension_texts(full)
    for dim in DIMENSIONS:
        if dim == emphasis:
            dims[dim] = full_texts[dim]
        else:
            dims[dim] = _truncate_words(dims.get(dim, full_texts[dim]), budget)
    persona = ""
    if simple:
        persona = _truncate_words(
            f"{full.basic_info.get('name')} is a {full.basic_info.get('profession')}. "
            f"{dims['traits']} {dims['current_state']}",
            2 * budget,
        )
    return CharacterSummary(dimensions=dims, source_revision=full.revision, persona=persona)


def _dimension_texts(cs: CharacterStructure) -> dict:
    return {
        "basic_info": ", ".join(f"{k}={v}" for k, v in sorted(cs.basic_info.items())),
        "current_state": cs.current_state,
        "traits": cs.traits,
        "conflict": cs.conflict,
        "preference": canonical_json(cs.preference.to_dict()),
    }


def validate_structure(cs: CharacterStructure, original: CharacterStructure | None = None) -> list[str]:
    """Total validation; returns every violated invariant (empty iff valid)."""
    report = []
    for key in ("name", "gender", "age", "profession"):
        if not str(cs.basic_info.get(key, "")).strip():
            report.append(f"basic_info.{key} missing")
    if not cs.current_state.strip():
        report.append("current_state")
    if not cs.traits.strip():
        report.append("traits")
    if not cs.conflict.strip():
        report.append("conflict")
    report.extend(cs.preference.violations())
    if cs.revision < 0:
        report.append("revision negative")
    if cs.big_five is not None:
        report.extend(cs.big_five.violations())
    if original is not None:
        if cs.basic_info != original.basic_info:
            report.append("basic_info immutability")
        if cs.revision <= original.revision:
            report.append("revision not increased")
    return report


def with_growth(cs: CharacterStructure, *, current_state=None, traits=None, conflict=None, preference=None) -> CharacterStructure:
    """New revision with the given dimensions replaced; basic_info copied verbatim."""
    return replace(
        cs,
        current_state=current_state if current_state is not None else cs.current_state,
        traits=traits if traits is not None else cs.traits,
        conflict=conflict if conflict is not None else cs.conflict,
        preference=preference if preference is not None else cs.preference,
        revision=cs.revision + 1,
    )
