"""Behavior system: daily planning, appointment negotiation, action
execution with occupancy replanning, and continuously deepening dialogue."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .character import CharacterSummary
from .environment import (GOAL_TAGS, OccupancyLedger, OccupiedError, WorldMap,
                          places_for_goal, travel_time, world_to_digest)
from .hashing import canonical_json, mix
from .lmclient import LmClient, PromptKind, PromptRequest

INTERRUPTIBLE_GOALS = {"Social", "Relaxation", "Meal", "Errand"}
EXT_FACTORS = {"low": 0.5, "moderate": 1.0, "high": 1.5}
DIALOG_BASE_PROBABILITY = 0.3
DIALOG_RADIUS_CELLS = 2
DEFAULT_MAX_TURNS = 6


@dataclass
class PlanEntry:
    start: int  # minutes of day
    end: int
    goal: str
    place: str
    description: str
    motivation: str
    status: str = "pending"  # pending|active|done|cancelled|replanned
    partner: str = ""  # appointment partner, if any

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "goal": self.goal, "place": self.place,
                "description": self.description, "motivation": self.motivation,
                "status": self.status, "partner": self.partner}

    @classmethod
    def from_dict(cls, d: dict) -> "PlanEntry":
        return cls(**d)


@dataclass
class DailyPlan:
    agent: str
    day: int
    entries: list[PlanEntry] = field(default_factory=list)

    def active_entries(self) -> list[PlanEntry]:
        return [e for e in self.entries if e.status not in ("cancelled", "replanned")]

    def to_dict(self) -> dict:
        return {"agent": self.agent, "day": self.day,
                "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "DailyPlan":
        return cls(agent=d["agent"], day=d["day"],
                   entries=[PlanEntry.from_dict(e) for e in d["entries"]])


@dataclass
class Invitation:
    from_agent: str
    to_agent: str
    start: int
    end: int
    place: str
    topic: str
    reason: str
    status: str = "pending"  # pending|accepted|rejected|superseded
    benefit: float = 0.0
    response_reason: str = ""

    def to_dict(self) -> dict:
        return self.__dict__.copy()


class DialogMemory:
    """Per-partner, append-only (day, topic, summary) records."""

    def __init__(self, records: dict[str, list[dict]] | None = None):
        self.records: dict[str, list[dict]] = records or {}

    def append(self, partner: str, day: int, topic: str, summary: str) -> None:
        self.records.setdefault(partner, []).append(
            {"day": day, "topic": topic, "summary": summary})

    def topics(self, partner: str) -> list[str]:
        return [r["topic"] for r in self.records.get(partner, [])]

    def digest(self, partner: str) -> list[str]:
        return [r["summary"] for r in self.records.get(partner, [])]

    def to_dict(self) -> dict:
        return {k: list(v) for k, v in sorted(self.records.items())}


@dataclass
class Conversation:
    participants: tuple[str, str]
    topic: str
    turns: list[tuple[str, str]]
    start_tick: int
    end_tick: int

    def to_dict(self) -> dict:
        return {"participants": list(self.participants), "topic": self.topic,
                "turns": [list(t) for t in self.turns],
                "start_tick": self.start_tick, "end_tick": self.end_tick}


def _snap_up(minute: int, tick_minutes: int) -> int:
    rem = minute % tick_minutes
    return minute if rem == 0 else minute + (tick_minutes - rem)


def generate_daily_plan(agent: str, summary: CharacterSummary, world: WorldMap,
                        memory_digest: str, insight: str, client: LmClient, day: int,
                        home: str, day_start: int, day_end: int,
                        others: list[str]) -> DailyPlan:
    """Lay the backend's proposed items into a feasible 5-9 entry schedule."""
    resp = client.complete(PromptRequest(
        kind=PromptKind.PLAN_DAY,
        context={
            "summary": summary.text(),
            "world": canonical_json(world_to_digest(world)),
            "insight": insight,
            "memory_digest": memory_digest,
            "others": canonical_json(sorted(others)),
        },
        agent_id=agent, day=day, tick=0,
    ))
    plan = DailyPlan(agent=agent, day=day)
    cursor = day_start
    prev_place = home
    for item in resp.payload["items"]:
        if len(plan.entries) >= 9:
            break
        goal = item["goal"]
        if goal not in GOAL_TAGS:
            continue
        duration = _snap_up(int(item["duration_min"]), world.tick_minutes)
        candidates = places_for_goal(world, goal)
        suggested = item.get("place", "")
        ordered = [p for p in candidates if p.name == suggested] + \
                  [p for p in candidates if p.name != suggested]
        if goal == "Rest" and world.has_place(home) and not any(p.name == home for p in ordered):
            ordered.append(world.place(home))
        chosen = None
        for p in ordered:
            travel = travel_time(world, prev_place, p.name) * world.tick_minutes
            start = _snap_up(cursor + travel, world.tick_minutes)
            end = start + duration
            if p.open_min <= start and min(end, day_end) <= p.close_min:
                chosen = p
                break
        if chosen is None:
            continue
        place = chosen.name
        if end > day_end:
            if day_end - start >= world.tick_minutes:
                end = day_end
            else:
                break
        plan.entries.append(PlanEntry(
            start=start, end=end, goal=goal, place=place,
            description=item["description"], motivation=item["motivation"],
            partner=item.get("partner", ""),
        ))
        cursor = end
        prev_place = place
    while len(plan.entries) < 5:
        start = cursor if plan.entries else day_start
        start = _snap_up(start, world.tick_minutes)
        end = min(start + 30, day_end)
        if end <= start:
            break
        plan.entries.append(PlanEntry(start=start, end=end, goal="Rest", place=home,
                                      description="quiet time at home",
                                      motivation="recovering energy"))
        cursor = end
        prev_place = home
    return plan


def plan_integrity(plan: DailyPlan, world: WorldMap, home: str) -> list[str]:
    """Violations of the plan contract: sorted, non-overlapping, travel-feasible,
    affordance-respecting. Cancelled/replanned entries are skipped."""
    issues = []
    entries = plan.active_entries()
    for prev, cur in zip(entries, entries[1:]):
        if cur.start < prev.end:
            issues.append(f"overlap: {prev.place}@{prev.start} and {cur.place}@{cur.start}")
        gap_ticks = (cur.start - prev.end) // world.tick_minutes
        if travel_time(world, prev.place, cur.place) > gap_ticks:
            issues.append(f"travel infeasible {prev.place}->{cur.place} at {cur.start}")
    for e in entries:
        if e.start >= e.end:
            issues.append(f"empty slot at {e.start}")
        if not world.has_place(e.place):
            issues.append(f"unknown place {e.place}")
        elif e.goal not in world.place(e.place).affordances and not (e.goal == "Rest" and e.place == home):
            issues.append(f"{e.place} does not afford {e.goal}")
    return issues


def _overlaps(entry: PlanEntry, start: int, end: int) -> bool:
    return entry.start < end and start < entry.end


def _repair_feasibility(plan: DailyPlan, world: WorldMap, protected: PlanEntry) -> None:
    """Cancel neighbors that an inserted entry made travel-infeasible."""
    changed = True
    while changed:
        changed = False
        entries = plan.active_entries()
        for prev, cur in zip(entries, entries[1:]):
            gap_ticks = (cur.start - prev.end) // world.tick_minutes
            if travel_time(world, prev.place, cur.place) > gap_ticks:
                victim = prev if cur is protected else cur
                if victim is protected:
                    victim = prev
                victim.status = "cancelled"
                changed = True
                break


def respond_invitation(invitee: str, invitation: Invitation, plan: DailyPlan,
                       summary: CharacterSummary, world: WorldMap, client: LmClient,
                       day: int, day_start: int, day_end: int,
                       existing_benefit: float | None = None) -> tuple[bool, str, float]:
    """Decide on a pending invitation; returns (accept, reason, benefit)."""
    if invitation.start < day_start or invitation.end > day_end:
        return False, "out of hours", 0.0
    if world.place(invitation.place).capacity < 2:
        return False, "venue", 0.0
    conflict = [e for e in plan.active_entries()
                if e.goal == "Appointment" and _overlaps(e, invitation.start, invitation.end)]
    resp = client.complete(PromptRequest(
        kind=PromptKind.INVITE_DECIDE,
        context={
            "summary": summary.text(),
            "inviter": invitation.from_agent,
            "topic": invitation.topic,
            "slot": f"{invitation.start}-{invitation.end}",
            "place": invitation.place,
            "conflict_desc": "; ".join(f"{e.goal} with {e.partner}" for e in conflict),
        },
        agent_id=invitee, day=day, tick=0,
    ))
    accept = bool(resp.payload["accept"])
    benefit = float(resp.payload["benefit"])
    reason = resp.payload["reason"]
    if conflict and accept:
        # Weigh the standing appointment against the new one.
        if existing_benefit is not None and benefit <= existing_benefit:
            return False, "conflicting appointment judged more beneficial", benefit
    return accept, reason, benefit


def post_process_appointments(plans: dict[str, DailyPlan],
                              summaries: dict[str, CharacterSummary],
                              world: WorldMap, client: LmClient, day: int,
                              day_start: int, day_end: int) -> list[Invitation]:
    """Turn Appointment entries into invitations and reconcile both plans."""
    invitations: list[Invitation] = []
    accepted_benefit: dict[tuple[str, int], float] = {}  # (agent, start) -> benefit

    # Only entries present before reconciliation send invitations; mirrored
    # entries added below must not spawn reciprocal invites.
    originals = [(inviter, entry) for inviter in sorted(plans)
                 for entry in plans[inviter].entries
                 if entry.goal == "Appointment" and entry.status == "pending" and entry.partner]
    for inviter, entry in originals:
        if entry.status != "pending":
            continue  # superseded by an earlier acceptance this pass
        invitee = entry.partner
        if invitee not in plans:
            entry.goal = "Social"
            entry.partner = ""
            continue
        send = client.complete(PromptRequest(
            kind=PromptKind.INVITE_SEND,
            context={"summary": summaries[inviter].text(), "partner": invitee,
                     "slot": f"{entry.start}-{entry.end}", "place": entry.place},
            agent_id=inviter, day=day, tick=0,
        ))
        inv = Invitation(from_agent=inviter, to_agent=invitee, start=entry.start,
                         end=entry.end, place=entry.place,
                         topic=send.payload["topic"], reason=send.payload["reason"])
        existing = [e for e in plans[invitee].active_entries()
                    if e.goal == "Appointment" and e.partner
                    and _overlaps(e, inv.start, inv.end)]
        existing_benefit = max((accepted_benefit.get((invitee, e.start), 0.0) for e in existing),
                               default=None) if existing else None
        accept, reason, benefit = respond_invitation(
            invitee, inv, plans[invitee], summaries[invitee], world, client,
            day, day_start, day_end, existing_benefit)
        inv.benefit = benefit
        inv.response_reason = reason
        if accept:
            inv.status = "accepted"
            for e in existing:
                # New appointment judged more beneficial: supersede the old one.
                e.status = "cancelled"
                for other_entry in plans[e.partner].entries:
                    if (other_entry.goal == "Appointment" and other_entry.partner == invitee
                            and other_entry.start == e.start):
                        other_entry.status = "cancelled"
                for other_inv in invitations:
                    if other_inv.status == "accepted" and other_inv.place == e.place \
                            and other_inv.start == e.start and invitee in (other_inv.from_agent, other_inv.to_agent):
                        other_inv.status = "superseded"
            for e in plans[invitee].entries:
                if e.status == "pending" and _overlaps(e, inv.start, inv.end):
                    e.status = "cancelled"
            mirrored = PlanEntry(
                start=inv.start, end=inv.end, goal="Appointment", place=inv.place,
                description=f"meeting {inviter} to talk about {inv.topic}",
                motivation=reason, partner=inviter)
            plans[invitee].entries.append(mirrored)
            plans[invitee].entries.sort(key=lambda e: (e.start, e.end))
            _repair_feasibility(plans[invitee], world, mirrored)
            accepted_benefit[(invitee, inv.start)] = benefit
            accepted_benefit[(inviter, inv.start)] = benefit
            entry.status = "pending"  # stays; executed as the appointment
        else:
            inv.status = "rejected"
            entry.goal = "Social"
            entry.partner = ""
            entry.description = f"spending the slot solo after {invitee} declined"
        invitations.append(inv)
    return invitations


@dataclass
class ActionRecord:
    agent: str
    description: str
    place: str
    spots: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def execute_action(agent: str, entry: PlanEntry, world: WorldMap, ledger: OccupancyLedger,
                   client: LmClient, day: int, tick: int) -> tuple[str, ActionRecord | None, PlanEntry | None]:
    """Claim a spot and describe the action.

    Returns (outcome, record, replacement): outcome "ok" with a record,
    or "replanned" with a replacement entry, or "cancelled" when no
    affording venue has room.
    """
    companions = [entry.partner] if entry.goal == "Appointment" and entry.partner else []
    try:
        claim = ledger.claim_spot(entry.place, agent, companions)
    except OccupiedError:
        entry.status = "replanned"
        replacement = _revise_blocked_entry(agent, entry, world, ledger, client, day, tick)
        return ("replanned" if replacement else "cancelled"), None, replacement
    entry.status = "active"
    resp = client.complete(PromptRequest(
        kind=PromptKind.ACTION_DESCRIBE,
        context={"agent": agent, "activity": entry.description, "place": entry.place},
        agent_id=agent, day=day, tick=tick,
    ))
    return "ok", ActionRecord(agent=agent, description=resp.payload["description"],
                              place=entry.place, spots=claim.spots), None


def _revise_blocked_entry(agent: str, entry: PlanEntry, world: WorldMap,
                          ledger: OccupancyLedger, client: LmClient,
                          day: int, tick: int) -> PlanEntry | None:
    """Replan until conditions are met: same goal at an affording place with
    free capacity, else fall back to the backend's revision proposal."""
    needed = 2 if entry.partner else 1
    for p in places_for_goal(world, entry.goal):
        if p.name != entry.place and ledger.claimed(p.name) + needed <= p.capacity \
                and p.open_min <= entry.start and entry.end <= p.close_min:
            return replace(entry, place=p.name, status="pending")
    resp = client.complete(PromptRequest(
        kind=PromptKind.PLAN_REVISE,
        context={"summary": agent, "world": canonical_json(world_to_digest(world)),
                 "reason": f"{entry.place} was fully occupied",
                 "window": f"{entry.start}-{entry.end}"},
        agent_id=agent, day=day, tick=tick,
    ))
    for item in resp.payload["items"]:
        name = item["place"]
        if world.has_place(name) and ledger.claimed(name) + needed <= world.place(name).capacity:
            return PlanEntry(start=entry.start, end=entry.end, goal=item["goal"], place=name,
                             description=item["description"], motivation=item["motivation"])
    entry.status = "cancelled"
    return None


def extraversion_factor(summary: CharacterSummary) -> float:
    text = summary.text().lower()
    if "low extraversion" in text or "shy" in text:
        return EXT_FACTORS["low"]
    if "high extraversion" in text:
        return EXT_FACTORS["high"]
    return EXT_FACTORS["moderate"]


def maybe_start_conversation(a: str, b: str, distance_cells: int,
                             a_goal: str, b_goal: str, a_partner: str, b_partner: str,
                             a_summary: CharacterSummary, b_summary: CharacterSummary,
                             coin: float) -> bool:
    """Dialogue trigger: range-gated, forced for mutual social intent,
    otherwise probabilistic in the agents' extraversion."""
    if distance_cells > DIALOG_RADIUS_CELLS:
        return False
    if a_goal == "Appointment" and a_partner == b:
        return True
    if b_goal == "Appointment" and b_partner == a:
        return True
    if a_goal == "Social" or b_goal == "Social":
        return True
    factor = (extraversion_factor(a_summary) + extraversion_factor(b_summary)) / 2.0
    p = max(0.0, min(1.0, DIALOG_BASE_PROBABILITY * factor))
    return coin < p


def choose_topic(agent: str, partner: str, memory: DialogMemory,
                 summary: CharacterSummary, client: LmClient, day: int, tick: int) -> str:
    prior = memory.topics(partner)
    resp = client.complete(PromptRequest(
        kind=PromptKind.DIALOG_TOPIC,
        context={"summary": summary.text(), "partner": partner,
                 "memory": canonical_json(prior)},
        agent_id=agent, day=day, tick=tick,
    ))
    topic = resp.payload["topic"]
    while topic in prior:
        topic += " — revisited"
    return topic


def run_dialogue(a: str, b: str, topic: str, client: LmClient,
                 a_memory: DialogMemory, b_memory: DialogMemory,
                 day: int, tick: int, max_turns: int = DEFAULT_MAX_TURNS) -> Conversation:
    """Alternating turns, then a per-perspective summary into both memories."""
    n_turns = 2 + mix("turns", a, b, topic, day, tick) % max(1, max_turns - 1)
    n_turns = min(n_turns, max_turns)
    turns: list[tuple[str, str]] = []
    speakers = (a, b)
    for i in range(n_turns):
        speaker = speakers[i % 2]
        resp = client.complete(PromptRequest(
            kind=PromptKind.DIALOG_TURN,
            context={"topic": topic, "speaker": speaker, "turn": str(i)},
            agent_id=speaker, day=day, tick=tick,
        ))
        turns.append((speaker, resp.payload["utterance"]))
    transcript = canonical_json([list(t) for t in turns])
    for me, mem in ((a, a_memory), (b, b_memory)):
        resp = client.complete(PromptRequest(
            kind=PromptKind.DIALOG_SUMMARY,
            context={"topic": topic, "transcript": transcript, "perspective": me},
            agent_id=me, day=day, tick=tick,
        ))
        partner = b if me == a else a
        mem.append(partner, day, topic, resp.payload["summary"])
    return Conversation(participants=(a, b), topic=topic, turns=turns,
                        start_tick=tick, end_tick=tick)


def select_partner(agent: str, candidates: list[str], memory: DialogMemory,
                   summary: CharacterSummary, client: LmClient,
                   day: int, tick: int) -> tuple[str, str]:
    if not candidates:
        raise ValueError("no candidate partners")
    resp = client.complete(PromptRequest(
        kind=PromptKind.PARTNER_SELECT,
        context={"summary": summary.text(),
                 "candidates": canonical_json(sorted(candidates)),
                 "memory": canonical_json({c: memory.topics(c) for c in sorted(candidates)})},
        agent_id=agent, day=day, tick=tick,
    ))
    partner = resp.payload["partner"]
    if partner not in candidates:
        partner = sorted(candidates)[0]
    return partner, resp.payload["reason"]
