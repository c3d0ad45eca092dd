"""BFI-44 administration and scoring.

Item key per John & Srivastava (1999): 44 items, five dimensions with
10/9/8/9/8 items (O/C/E/A/N), reverse-keyed items mapped x -> 6 - x,
dimension scores reported as raw sums.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..character import BFI_ITEM_COUNTS, BigFiveVector, CharacterStructure
from ..hashing import canonical_json
from ..lmclient import DecodeError, LmClient, PromptKind, PromptRequest

# (item number, text, dimension, reversed)
BFI_ITEMS: list[tuple[int, str, str, bool]] = [
    (1, "Is talkative", "extraversion", False),
    (2, "Tends to find fault with others", "agreeableness", True),
    (3, "Does a thorough job", "conscientiousness", False),
    (4, "Is depressed, blue", "neuroticism", False),
    (5, "Is original, comes up with new ideas", "openness", False),
    (6, "Is reserved", "extraversion", True),
    (7, "Is helpful and unselfish with others", "agreeableness", False),
    (8, "Can be somewhat careless", "conscientiousness", True),
    (9, "Is relaxed, handles stress well", "neuroticism", True),
    (10, "Is curious about many different things", "openness", False),
    (11, "Is full of energy", "extraversion", False),
    (12, "Starts quarrels with others", "agreeableness", True),
    (13, "Is a reliable worker", "conscientiousness", False),
    (14, "Can be tense", "neuroticism", False),
    (15, "Is ingenious, a deep thinker", "openness", False),
    (16, "Generates a lot of enthusiasm", "extraversion", False),
    (17, "Has a forgiving nature", "agreeableness", False),
    (18, "Tends to be disorganized", "conscientiousness", True),
    (19, "Worries a lot", "neuroticism", False),
    (20, "Has an active imagination", "openness", False),
    (21, "Tends to be quiet", "extraversion", True),
    (22, "Is generally trusting", "agreeableness", False),
    (23, "Tends to be lazy", "conscientiousness", True),
    (24, "Is emotionally stable, not easily upset", "neuroticism", True),
    (25, "Is inventive", "openness", False),
    (26, "Has an assertive personality", "extraversion", False),
    (27, "Can be cold and aloof", "agreeableness", True),
    (28, "Perseveres until the task is finished", "conscientiousness", False),
    (29, "Can be moody", "neuroticism", False),
    (30, "Values artistic, aesthetic experiences", "openness", False),
    (31, "Is sometimes shy, inhibited", "extraversion", True),
    (32, "Is considerate and kind to almost everyone", "agreeableness", False),
    (33, "Does things efficiently", "conscientiousness", False),
    (34, "Remains calm in tense situations", "neuroticism", True),
    (35, "Prefers work that is routine", "openness", True),
    (36, "Is outgoing, sociable", "extraversion", False),
    (37, "Is sometimes rude to others", "agreeableness", True),
    (38, "Makes plans and follows through with them", "conscientiousness", False),
    (39, "Gets nervous easily", "neuroticism", False),
    (40, "Likes to reflect, play with ideas", "openness", False),
    (41, "Has few artistic interests", "openness", True),
    (42, "Likes to cooperate with others", "agreeableness", False),
    (43, "Is easily distracted", "conscientiousness", True),
    (44, "Is sophisticated in art, music, or literature", "openness", False),
]

assert len(BFI_ITEMS) == 44
assert {d: sum(1 for it in BFI_ITEMS if it[2] == d) for d in BFI_ITEM_COUNTS} == BFI_ITEM_COUNTS


class AssessmentError(RuntimeError):
    pass


@dataclass(frozen=True)
class BfiAnswerSheet:
    agent: str
    day: int
    answers: tuple[int, ...]  # 44 Likert answers, item order

    def __post_init__(self):
        if len(self.answers) != 44:
            raise ValueError("sheet must hold exactly 44 answers")
        if any(not 1 <= a <= 5 for a in self.answers):
            raise ValueError("answers must be integers 1..5")


@dataclass(frozen=True)
class BfiScores:
    agent: str
    day: int
    vector: BigFiveVector

    def as_dict(self) -> dict:
        return {"agent": self.agent, "day": self.day, **self.vector.to_dict()}


def administer_bfi(agent: str, structures: list[CharacterStructure], client: LmClient,
                   day: int = 0) -> list[BfiAnswerSheet]:
    """One sheet per day, produced by a single parallel-form request so the
    backend sees all days side by side and answers by their differences."""
    if not structures:
        raise ValueError("need at least one day of structures")
    items = [text for _, text, _, _ in BFI_ITEMS]
    req = PromptRequest(
        kind=PromptKind.BFI_FILL,
        context={"structures": canonical_json([s.to_dict() for s in structures]),
                 "items": canonical_json(items)},
        agent_id=agent, day=day, tick=0)
    try:
        resp = client.complete(req)
    except DecodeError:
        # One repair retry, then give up: the schema itself is the repair
        # instruction for the scripted backend, so a second identical ask is
        # the right move only for the HTTP path.
        try:
            resp = client.complete(req)
        except DecodeError as exc:
            raise AssessmentError(f"malformed BFI answers: {exc}") from exc
    sheets = resp.payload["sheets"]
    if len(sheets) != len(structures):
        raise AssessmentError(f"expected {len(structures)} sheets, got {len(sheets)}")
    return [BfiAnswerSheet(agent=agent, day=day + i, answers=tuple(sheet))
            for i, sheet in enumerate(sheets)]


def score_bfi(sheet: BfiAnswerSheet) -> BfiScores:
    """Per-dimension sums with reverse-keyed items mapped x -> 6 - x."""
    sums = {d: 0 for d in BFI_ITEM_COUNTS}
    for (number, _text, dimension, is_reversed), answer in zip(BFI_ITEMS, sheet.answers):
        sums[dimension] += (6 - answer) if is_reversed else answer
    return BfiScores(agent=sheet.agent, day=sheet.day, vector=BigFiveVector(**sums))
