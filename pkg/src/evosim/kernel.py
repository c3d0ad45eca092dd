"""Deterministic tick/day scheduler orchestrating every module.

All mutable state lives on the kernel; randomness is hash-derived from the
run seed, so a (config, world, command transcript) triple fully determines
the event log, byte for byte. Each record carries enough state to make the
log replayable into the exact final snapshot.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, asdict

from . import behavior, personality
from .behavior import DailyPlan, DialogMemory, PlanEntry
from .character import (CharacterStructure, CharacterSummary, init_character,
                        summarize_character)
from .environment import (OccupancyLedger, WorldMap, diff_worlds, load_world,
                          places_for_goal)
from .hashing import canonical_json, mix, unit_float
from .lmclient import (HttpBackend, LmClient, PromptKind, PromptRequest,
                       ScriptedBackend)
from .personality import EmotionState, InsightRecord, LongTermRecord, ShortTermRecord

LOG_VERSION = 1
DEFAULT_BRIEFS = [
    "enthusiastic and open Isabella, a lively filmmaker",
    "shy CS student Benjamin",
    "thoughtful novelist Sophia, a writer drawn to social insight",
]


@dataclass
class RunConfig:
    seed: int = 7
    days: int = 1
    agents: list[str] = field(default_factory=lambda: list(DEFAULT_BRIEFS))
    world_csv: str = ""  # inline CSV text; empty -> packaged default world
    backend: str = "scripted"  # scripted | http
    tick_minutes: int = 15
    day_start_min: int = 6 * 60
    day_end_min: int = 23 * 60
    disable_cognitive_feelings: bool = False
    disable_insight: bool = False
    disable_growth: bool = False
    simple_character: bool = False
    memory_capacity: int = personality.DEFAULT_MEMORY_CAPACITY
    blur_batch: int = personality.DEFAULT_BLUR_BATCH
    max_turns: int = behavior.DEFAULT_MAX_TURNS
    summary_budget: int = 60
    bfi_daily: bool = False
    log_lm_traffic: bool = True

    @property
    def ticks_per_day(self) -> int:
        return (self.day_end_min - self.day_start_min) // self.tick_minutes

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})

    def world_text(self) -> str:
        if self.world_csv:
            return self.world_csv
        path = os.path.join(os.path.dirname(__file__), "data", "default_world.csv")
        with open(path, encoding="utf-8") as fh:
            return fh.read()


class EventLog:
    """Append-only, versioned JSONL event log."""

    def __init__(self, path: str | None = None):
        self.path = path
        self.records: list[dict] = []
        self._fh = open(path, "a", encoding="utf-8") if path else None
        self.seq = 0

    def append(self, day: int, tick: int, agent: str, type_: str, payload: dict) -> dict:
        record = {"v": LOG_VERSION, "seq": self.seq, "day": day, "tick": tick,
                  "agent": agent, "type": type_, "payload": payload}
        self.seq += 1
        self.records.append(record)
        if self._fh:
            self._fh.write(canonical_json(record) + "\n")
        return record

    def flush(self) -> None:
        if self._fh:
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        if self._fh:
            self.flush()
            self._fh.close()
            self._fh = None


def read_log(path: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"corrupt log line {lineno}: {exc}") from exc
    return records


@dataclass
class AgentRuntime:
    id: str
    structure: CharacterStructure
    home: str
    position: tuple[int, int]
    summary: CharacterSummary | None = None
    plan: DailyPlan | None = None
    emotion: EmotionState | None = None
    short_term: list[ShortTermRecord] = field(default_factory=list)
    long_term: list[LongTermRecord] = field(default_factory=list)
    dialog_memory: DialogMemory = field(default_factory=DialogMemory)
    insights: list[InsightRecord] = field(default_factory=list)
    active_idx: int | None = None
    busy_until_tick: int = -1
    day_events: list[str] = field(default_factory=list)


class BusyError(RuntimeError):
    pass


class Simulation:
    def __init__(self, config: RunConfig, log_path: str | None = None):
        self.config = config
        self.world = load_world(config.world_text(), tick_minutes=config.tick_minutes)
        self.ledger = OccupancyLedger(self.world)
        self.log = EventLog(log_path)
        self.day = 0  # last day whose records were opened; 1-based during a day
        self.tick = 0
        self.agents: dict[str, AgentRuntime] = {}
        self.staged_world_csv: str | None = None
        self._talked_pairs: set[tuple[str, str]] = set()
        backend = ScriptedBackend(config.seed) if config.backend == "scripted" else HttpBackend()
        self.client = LmClient(backend=backend, log_hook=self._log_lm if config.log_lm_traffic else None)
        self._initialized = False

    # -- plumbing -------------------------------------------------------------

    def _log_lm(self, req: PromptRequest, resp) -> None:
        self.log.append(req.day, req.tick, req.agent_id, "lm", {
            "kind": req.kind.value, "context": req.canonical(),
            "response": resp.payload, "backend": resp.backend_id})

    def _emit(self, agent: str, type_: str, payload: dict) -> dict:
        return self.log.append(self.day, self.tick, agent, type_, payload)

    def _now_min(self) -> int:
        return self.config.day_start_min + self.tick * self.config.tick_minutes

    def clock_hhmm(self) -> str:
        m = self._now_min()
        return f"{m // 60:02d}:{m % 60:02d}"

    # -- lifecycle ------------------------------------------------------------

    def initialize(self) -> None:
        cfg = self.config
        self.log.append(0, 0, "", "config", {
            "config": cfg.to_dict(), "world_csv": cfg.world_text()})
        rest_places = places_for_goal(self.world, "Rest") or self.world.places
        used: set[str] = set()
        for i, brief in enumerate(cfg.agents):
            structure = init_character(brief, self.client, agent_id=f"agent{i}")
            agent_id = structure.name.lower()
            while agent_id in used:
                agent_id += "2"
            used.add(agent_id)
            home = rest_places[i % len(rest_places)].name
            pos = (self.world.place(home).x, self.world.place(home).y)
            self.agents[agent_id] = AgentRuntime(
                id=agent_id, structure=structure, home=home, position=pos)
            self.log.append(0, 0, agent_id, "char_init", {
                "structure": structure.to_dict(), "home": home, "pos": list(pos)})
        self._initialized = True

    def _sorted_agents(self) -> list[AgentRuntime]:
        return [self.agents[a] for a in sorted(self.agents)]

    def _refresh_summary(self, rt: AgentRuntime) -> None:
        rt.summary = summarize_character(
            rt.structure, self.client, emphasis="preference",
            budget=self.config.summary_budget, agent_id=rt.id, day=self.day,
            simple=self.config.simple_character)

    # -- day orchestration ----------------------------------------------------

    def start_day(self) -> None:
        if not self._initialized:
            self.initialize()
        self.day += 1
        self.tick = 0
        self._talked_pairs.clear()
        if self.staged_world_csv is not None:
            self.world = load_world(self.staged_world_csv, tick_minutes=self.config.tick_minutes)
            self.ledger = OccupancyLedger(self.world)
            self._emit("", "env_applied", {"world_csv": self.staged_world_csv})
            self.staged_world_csv = None
        cfg = self.config
        plans: dict[str, DailyPlan] = {}
        summaries: dict[str, CharacterSummary] = {}
        for rt in self._sorted_agents():
            self._refresh_summary(rt)
            summaries[rt.id] = rt.summary
            insight = "" if cfg.disable_insight or not rt.insights else rt.insights[-1].reflection
            digest = " | ".join(r.summary for r in rt.long_term[-10:])
            plan = behavior.generate_daily_plan(
                rt.id, rt.summary, self.world, digest, insight, self.client,
                self.day, rt.home, cfg.day_start_min, cfg.day_end_min,
                others=[a for a in self.agents if a != rt.id])
            plans[rt.id] = plan
            self._emit(rt.id, "plan", {"stage": "draft", "plan": plan.to_dict()})
        invitations = behavior.post_process_appointments(
            plans, summaries, self.world, self.client, self.day,
            cfg.day_start_min, cfg.day_end_min)
        for inv in invitations:
            self._emit(inv.from_agent, "invite", inv.to_dict())
        for rt in self._sorted_agents():
            rt.plan = plans[rt.id]
            rt.active_idx = None
            rt.busy_until_tick = -1
            rt.day_events = []
            self._emit(rt.id, "plan_final", {"stage": "final", "plan": rt.plan.to_dict()})

    def run_day(self) -> None:
        self.start_day()
        for _ in range(self.config.ticks_per_day):
            self.step_tick()
        self.end_day()

    def run(self) -> None:
        try:
            for _ in range(self.config.days):
                self.run_day()
        finally:
            self.log.flush()

    # -- tick mechanics -------------------------------------------------------

    def _move_toward(self, rt: AgentRuntime, target: tuple[int, int]) -> None:
        x, y = rt.position
        tx, ty = target
        budget = self.world.move_speed
        while budget > 0 and (x, y) != (tx, ty):
            if x != tx:
                x += 1 if tx > x else -1
            else:
                y += 1 if ty > y else -1
            budget -= 1
        if (x, y) != rt.position:
            rt.position = (x, y)
            self._emit(rt.id, "move", {"pos": [x, y]})

    def _place_coords(self, name: str) -> tuple[int, int]:
        p = self.world.place(name)
        return (p.x, p.y)

    def _entry_payload(self, rt: AgentRuntime, phase: str, entry_index: int | None,
                       extra: dict | None = None) -> dict:
        payload = {"phase": phase, "entry_index": entry_index,
                   "plan": rt.plan.to_dict() if rt.plan else None,
                   "ledger": self.ledger.snapshot()}
        if extra:
            payload.update(extra)
        return payload

    def _finish_entry(self, rt: AgentRuntime) -> None:
        entry = rt.plan.entries[rt.active_idx]
        entry.status = "done"
        self.ledger.release_spot(rt.id)
        idx, rt.active_idx = rt.active_idx, None
        self._emit(rt.id, "action", self._entry_payload(rt, "end", idx))

    def _record_emotion(self, rt: AgentRuntime, action_text: str) -> None:
        prev = rt.emotion
        state = personality.update_emotion(
            rt.id, action_text, rt.structure, prev, self.client, self.day, self.tick,
            feelings_enabled=not self.config.disable_cognitive_feelings)
        rt.emotion = state
        rt.short_term.append(ShortTermRecord(day=self.day, tick=self.tick,
                                             action=action_text, emotion=state))
        self._emit(rt.id, "emotion", {"state": state.to_dict(), "action": action_text,
                                      "previous": prev.to_dict() if prev else None})
        if (not self.config.disable_cognitive_feelings
                and personality.check_replan_trigger(prev, state)):
            self._replan_on_emotion(rt, prev, state)

    def _replan_on_emotion(self, rt: AgentRuntime, prev: EmotionState, nxt: EmotionState) -> None:
        """Swap the next pending entry for a recovery entry in the same slot."""
        now = self._now_min()
        pending = [e for e in rt.plan.active_entries()
                   if e.status == "pending" and e.start > now]
        if not pending:
            return
        target = pending[0]
        resp = self.client.complete(PromptRequest(
            kind=PromptKind.PLAN_REVISE,
            context={"summary": rt.summary.text(),
                     "world": canonical_json(
                         [{"place": p.name, "goals": sorted(p.affordances)}
                          for p in self.world.places]),
                     "reason": f"an emotional shift from {prev.category} to {nxt.category}",
                     "window": f"{target.start}-{target.end}"},
            agent_id=rt.id, day=self.day, tick=self.tick))
        items = resp.payload["items"]
        if not items:
            return
        item = items[0]
        if not self.world.has_place(item["place"]):
            return
        target.status = "replanned"
        replacement = PlanEntry(start=target.start, end=target.end, goal=item["goal"],
                                place=item["place"], description=item["description"],
                                motivation=item["motivation"])
        rt.plan.entries.append(replacement)
        rt.plan.entries.sort(key=lambda e: (e.start, e.end))
        behavior._repair_feasibility(rt.plan, self.world, replacement)
        self._emit(rt.id, "replan", {
            "cause": "emotion", "from_category": prev.category,
            "to_category": nxt.category, "plan": rt.plan.to_dict()})

    def _start_due_entry(self, rt: AgentRuntime, idx: int) -> None:
        entry = rt.plan.entries[idx]
        outcome, record, replacement = behavior.execute_action(
            rt.id, entry, self.world, self.ledger, self.client, self.day, self.tick)
        if outcome == "ok":
            rt.active_idx = idx
            rt.day_events.append(record.description)
            self._emit(rt.id, "action", self._entry_payload(
                rt, "start", idx, {"record": record.to_dict()}))
            self._record_emotion(rt, record.description)
        else:
            if replacement is not None:
                rt.plan.entries.append(replacement)
                rt.plan.entries.sort(key=lambda e: (e.start, e.end))
            self._emit(rt.id, "action", self._entry_payload(
                rt, "blocked", None, {"outcome": outcome}))
            self._emit(rt.id, "replan", {"cause": "occupied", "plan": rt.plan.to_dict()})

    def step_tick(self) -> None:
        now = self._now_min()
        cfg = self.config
        for rt in self._sorted_agents():
            plan = rt.plan
            if plan is None:
                continue
            if rt.active_idx is not None and plan.entries[rt.active_idx].end <= now:
                self._finish_entry(rt)
            # Expire pending entries whose window already closed.
            for i, e in enumerate(plan.entries):
                if e.status == "pending" and e.end <= now:
                    e.status = "cancelled"
                    self._emit(rt.id, "action", self._entry_payload(rt, "expired", i))
            if rt.active_idx is None:
                due = next((i for i, e in enumerate(plan.entries)
                            if e.status == "pending" and e.start <= now < e.end), None)
                if due is not None:
                    coords = self._place_coords(plan.entries[due].place)
                    if rt.position != coords:
                        self._move_toward(rt, coords)
                    if rt.position == coords:
                        self._start_due_entry(rt, due)
                else:
                    upcoming = next((e for e in plan.entries
                                     if e.status == "pending" and e.start > now), None)
                    if upcoming is not None:
                        coords = self._place_coords(upcoming.place)
                        dist = abs(rt.position[0] - coords[0]) + abs(rt.position[1] - coords[1])
                        ticks_needed = math.ceil(dist / self.world.move_speed)
                        ticks_left = (upcoming.start - now) // cfg.tick_minutes
                        if dist and ticks_needed >= ticks_left:
                            self._move_toward(rt, coords)
        self._run_dialog_phase()
        self.tick += 1

    def _active_goal(self, rt: AgentRuntime) -> tuple[str, str]:
        if rt.plan is None or rt.active_idx is None:
            return "", ""
        e = rt.plan.entries[rt.active_idx]
        return e.goal, e.partner

    def _interruptible(self, rt: AgentRuntime) -> bool:
        if self.tick < rt.busy_until_tick:
            return False
        goal, _ = self._active_goal(rt)
        return goal == "" or goal in behavior.INTERRUPTIBLE_GOALS or goal == "Appointment"

    def _run_dialog_phase(self) -> None:
        ids = sorted(self.agents)
        in_conv: set[str] = set()
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if a in in_conv or b in in_conv:
                    continue
                if (a, b) in self._talked_pairs:
                    continue
                ra, rb = self.agents[a], self.agents[b]
                if not (self._interruptible(ra) and self._interruptible(rb)):
                    continue
                dist = abs(ra.position[0] - rb.position[0]) + abs(ra.position[1] - rb.position[1])
                a_goal, a_partner = self._active_goal(ra)
                b_goal, b_partner = self._active_goal(rb)
                coin = unit_float(mix(self.config.seed, "dialog", self.day, self.tick, a, b))
                if behavior.maybe_start_conversation(
                        a, b, dist, a_goal, b_goal, a_partner, b_partner,
                        ra.summary, rb.summary, coin):
                    self._hold_conversation(ra, rb)
                    in_conv.update((a, b))
                    self._talked_pairs.add((a, b))

    def _hold_conversation(self, ra: AgentRuntime, rb: AgentRuntime) -> None:
        topic = behavior.choose_topic(ra.id, rb.id, ra.dialog_memory, ra.summary,
                                      self.client, self.day, self.tick)
        conv = behavior.run_dialogue(ra.id, rb.id, topic, self.client,
                                     ra.dialog_memory, rb.dialog_memory,
                                     self.day, self.tick, max_turns=self.config.max_turns)
        summaries = {rt.id: rt.dialog_memory.records[other][-1]["summary"]
                     for rt, other in ((ra, rb.id), (rb, ra.id))}
        self._emit(ra.id, "dialog", {"conversation": conv.to_dict(), "summaries": summaries})
        for rt in (ra, rb):
            rt.busy_until_tick = self.tick + 1
            rt.day_events.append(f"conversation about {topic}")
            self._record_emotion(rt, f"a conversation about {topic}")

    # -- end of day -----------------------------------------------------------

    def end_day(self) -> None:
        cfg = self.config
        for rt in self._sorted_agents():
            if rt.active_idx is not None:
                self._finish_entry(rt)
            if self.ledger.holder_place(rt.id):
                self.ledger.release_spot(rt.id)
                self._emit(rt.id, "action", self._entry_payload(rt, "release", None))
            for i, e in enumerate(rt.plan.entries if rt.plan else []):
                if e.status == "pending":
                    e.status = "cancelled"
                    self._emit(rt.id, "action", self._entry_payload(rt, "expired", i))
        for rt in self._sorted_agents():
            new_records = personality.filter_memories(
                rt.id, rt.short_term, rt.structure, self.client, self.day)
            rt.long_term.extend(new_records)
            rt.long_term = personality.decay_memories(
                rt.long_term, self.client, rt.id, self.day,
                capacity=cfg.memory_capacity, blur_batch=cfg.blur_batch)
            rt.short_term = []
            self._emit(rt.id, "memory", {
                "new": [r.to_dict() for r in new_records],
                "store": [r.to_dict() for r in rt.long_term]})
            insight = None
            if not cfg.disable_insight:
                insight = personality.generate_insight(
                    rt.id, rt.day_events, rt.long_term, rt.structure, self.client, self.day)
                rt.insights.append(insight)
                self._emit(rt.id, "insight", insight.to_dict())
            if not cfg.disable_growth:
                if insight is None:
                    insight = InsightRecord(day=self.day, reflection="an uneventful day")
                day_summary = "; ".join(rt.day_events[:8]) or "a quiet day"
                new_structure, delta = personality.grow_character(
                    rt.id, insight, day_summary, rt.structure, self.client, self.day)
                rt.structure = new_structure
                self._emit(rt.id, "growth", {"delta": delta.to_dict(),
                                             "structure": new_structure.to_dict()})
            if cfg.bfi_daily:
                from .evaluation.bfi import administer_bfi
                sheets = administer_bfi(rt.id, [rt.structure], self.client, day=self.day)
                self._emit(rt.id, "bfi", {"answers": sheets[0].answers})
        self._emit("", "day_end", {"ledger": self.ledger.snapshot()})
        self.log.flush()

    # -- commands -------------------------------------------------------------

    def submit_chat(self, agent_id: str, text: str) -> dict:
        if agent_id not in self.agents:
            raise KeyError(agent_id)
        rt = self.agents[agent_id]
        if self.tick < rt.busy_until_tick:
            raise BusyError(f"{agent_id} is in a conversation")
        if rt.summary is None:
            self._refresh_summary(rt)
        self._emit(agent_id, "command", {"command": "chat", "text": text})
        reply = self.client.complete(PromptRequest(
            kind=PromptKind.CHAT_REPLY,
            context={"summary": rt.summary.text(), "text": text,
                     "memory": canonical_json(rt.dialog_memory.topics("user"))},
            agent_id=agent_id, day=self.day, tick=self.tick)).payload["reply"]
        summary = self.client.complete(PromptRequest(
            kind=PromptKind.DIALOG_SUMMARY,
            context={"topic": text, "transcript": canonical_json([["user", text], [agent_id, reply]]),
                     "perspective": agent_id},
            agent_id=agent_id, day=self.day, tick=self.tick)).payload["summary"]
        rt.dialog_memory.append("user", self.day, text, summary)
        self._emit(agent_id, "dialog", {
            "conversation": {"participants": [agent_id, "user"], "topic": text,
                             "turns": [["user", text], [agent_id, reply]],
                             "start_tick": self.tick, "end_tick": self.tick},
            "summaries": {agent_id: summary}})
        rt.busy_until_tick = self.tick + 1  # user chat consumes the agent's tick
        return {"agent": agent_id, "text": text, "reply": reply,
                "day": self.day, "tick": self.tick}

    def submit_env_update(self, csv_text: str) -> dict:
        new_world = load_world(csv_text, tick_minutes=self.config.tick_minutes)
        report = diff_worlds(self.world, new_world)
        report["effective_day"] = self.day + 1
        if report["added"] or report["removed"] or report["changed"]:
            self.staged_world_csv = csv_text
            self._emit("", "command", {"command": "env_update", "diff": report})
            self._emit("", "env_staged", {"diff": report})
        return report

    # -- snapshot & replay ----------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "day": self.day,
            "tick": self.tick,
            "clock": self.clock_hhmm() if self.tick < self.config.ticks_per_day else "day end",
            "agents": {
                rt.id: {
                    "structure": rt.structure.to_dict(),
                    "home": rt.home,
                    "position": list(rt.position),
                    "plan": rt.plan.to_dict() if rt.plan else None,
                    "emotion": rt.emotion.to_dict() if rt.emotion else None,
                    "short_term": [r.to_dict() for r in rt.short_term],
                    "long_term": [r.to_dict() for r in rt.long_term],
                    "dialog_memory": rt.dialog_memory.to_dict(),
                    "insights": [r.to_dict() for r in rt.insights],
                }
                for rt in self._sorted_agents()
            },
            "ledger": self.ledger.snapshot(),
        }

    def save_state(self, path: str) -> None:
        state = {"config": self.config.to_dict(), "snapshot": self.snapshot(),
                 "seq": self.log.seq, "staged_world_csv": self.staged_world_csv,
                 "world_csv": _world_to_csv_passthrough(self)}
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(state))

    @classmethod
    def load_state(cls, path: str, log_path: str | None = None) -> "Simulation":
        with open(path, encoding="utf-8") as fh:
            state = json.load(fh)
        config = RunConfig.from_dict(state["config"])
        sim = cls(config, log_path=log_path)
        if state.get("world_csv"):
            sim.world = load_world(state["world_csv"], tick_minutes=config.tick_minutes)
            sim.ledger = OccupancyLedger(sim.world)
        snap = state["snapshot"]
        sim.day = snap["day"]
        sim.tick = snap["tick"]
        sim.log.seq = state["seq"]
        sim.staged_world_csv = state.get("staged_world_csv")
        for agent_id, a in snap["agents"].items():
            rt = AgentRuntime(
                id=agent_id,
                structure=CharacterStructure.from_dict(a["structure"]),
                home=a["home"], position=tuple(a["position"]),
                plan=DailyPlan.from_dict(a["plan"]) if a["plan"] else None,
                emotion=EmotionState.from_dict(a["emotion"]) if a["emotion"] else None,
                short_term=[ShortTermRecord.from_dict(r) for r in a["short_term"]],
                long_term=[LongTermRecord.from_dict(r) for r in a["long_term"]],
                dialog_memory=DialogMemory({k: list(v) for k, v in a["dialog_memory"].items()}),
                insights=[InsightRecord(day=r["day"], reflection=r["reflection"])
                          for r in a["insights"]])
            sim.agents[agent_id] = rt
        sim._initialized = True
        return sim


def _world_to_csv_passthrough(sim: Simulation) -> str:
    # The active world's CSV text: either the staged/startup text or the config's.
    return sim.config.world_text() if sim.staged_world_csv is None else sim.staged_world_csv


def run_simulation(config: RunConfig, log_path: str) -> Simulation:
    sim = Simulation(config, log_path=log_path)
    sim.run()
    sim.log.close()
    return sim


# -- replay -------------------------------------------------------------------

def replay_log(records: list[dict]) -> dict:
    """Fold an event log back into the final-state snapshot."""
    config = None
    agents: dict[str, dict] = {}
    ledger: dict[str, dict] = {}
    day = 0
    tick = 0
    for rec in records:
        day = max(day, rec["day"])
        t = rec["type"]
        agent = rec["agent"]
        p = rec["payload"]
        if t == "config":
            config = RunConfig.from_dict(p["config"])
        elif t == "char_init":
            agents[agent] = {
                "structure": p["structure"], "home": p["home"],
                "position": list(p["pos"]), "plan": None, "emotion": None,
                "short_term": [], "long_term": [], "dialog_memory": {},
                "insights": []}
        elif t in ("plan", "plan_final"):
            agents[agent]["plan"] = p["plan"]
        elif t == "replan":
            agents[agent]["plan"] = p["plan"]
        elif t == "action":
            agents[agent]["plan"] = p["plan"]
            ledger = p["ledger"]
        elif t == "move":
            agents[agent]["position"] = list(p["pos"])
        elif t == "emotion":
            agents[agent]["emotion"] = p["state"]
            agents[agent]["short_term"].append({
                "day": rec["day"], "tick": rec["tick"], "action": p["action"],
                "emotion": p["state"]})
        elif t == "dialog":
            conv = p["conversation"]
            participants = conv["participants"]
            for me, summary in p["summaries"].items():
                other = [x for x in participants if x != me][0]
                agents[me]["dialog_memory"].setdefault(other, []).append(
                    {"day": rec["day"], "topic": conv["topic"], "summary": summary})
        elif t == "memory":
            agents[agent]["long_term"] = p["store"]
            agents[agent]["short_term"] = []
        elif t == "insight":
            agents[agent]["insights"].append(p)
        elif t == "growth":
            agents[agent]["structure"] = p["structure"]
        elif t == "day_end":
            ledger = p["ledger"]
    if config is not None:
        tick = config.ticks_per_day
    return {
        "day": day,
        "tick": tick,
        "clock": "day end",
        "agents": {a: agents[a] for a in sorted(agents)},
        "ledger": ledger,
    }
