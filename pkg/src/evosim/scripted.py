"""Deterministic scripted backend.

Every response is a pure function of (kind, canonical context, run seed):
a 64-bit FNV-1a hash of selected context fields drives template selection,
so identical logical requests always produce byte-identical payloads, on
any platform. Agent-visible texture comes from small template pools; the
behavioral knobs (extraversion keyword, goal mixes, emotion valence) are
what the rest of the engine keys off.
"""
from __future__ import annotations

import json

from .hashing import canonical_context, mix, unit_float
from .lmclient import PromptKind

EXT_LOW_WORDS = ("shy", "quiet", "reserved", "introvert", "timid")
EXT_HIGH_WORDS = ("enthusiastic", "outgoing", "extravert", "sociable", "energetic", "lively")
OPEN_WORDS = ("open", "creative", "curious", "imaginative")

POSITIVE_WORDS = ("excit", "writ", "creat", "novel", "friend", "enjoy", "success",
                  "insight", "progress", "breakthrough", "warm", "inspir")
NEGATIVE_WORDS = ("doubt", "anxi", "pressure", "fear", "fail", "worri", "tired",
                  "reject", "crowd", "stress", "conflict")

PROFESSIONS = {
    "cs": "computer science student",
    "computer": "computer science student",
    "program": "software developer",
    "writer": "novelist",
    "novelist": "novelist",
    "film": "filmmaker",
    "paint": "painter",
    "music": "musician",
    "teach": "teacher",
    "student": "student",
}
PROFESSION_POOL = ("graduate student", "illustrator", "journalist", "architect")
OTHER_FIELDS = ("literature", "philosophy", "visual art", "social science", "music theory")
HOBBY_POOL = ("reading", "sketching", "jogging", "cooking", "chess", "photography", "journaling")
SOCIAL_VENUES = ("cafe", "square", "gym", "market")
QUIET_VENUES = ("library", "dorm", "studio")

STATE_POOL = (
    "Settling into a new routine and watching how each day reshapes my priorities.",
    "Carrying yesterday's conversations with me while I work.",
    "Trying to balance steady output with time for health and happiness maintenance.",
    "Noticing that my energy depends on who I spend the day with.",
)
SHIFT_POOL = (
    "more willingness to share half-finished ideas",
    "a steadier patience with slow progress",
    "growing curiosity about other people's crafts",
    "an easier time asking others for help",
)
CONFLICT_EVOLUTION = (
    "it feels less like a contradiction and more like two halves of one pursuit",
    "I am starting to feel more free and authentic about choosing for myself",
    "the pressure of outside expectations is loosening its grip",
    "I can hold both ambitions without one silencing the other",
)
INSIGHT_POOL = (
    "that my work gains depth when I pair it with humanitarian care for the people around me",
    "that integrating technology with the humanities opens paths I had not considered",
    "that life encompasses more than work or academics, and rest is part of the craft",
    "that honest conversation moves my thinking further than another hour alone",
    "that small daily habits are quietly rewriting what I want",
)
TOPIC_INTROS = (
    "getting to know each other's daily routines",
    "what first drew us to our crafts",
    "favorite corners of the campus",
    "books that changed how we work",
)
TOPIC_ASPECTS = (
    "the deeper side", "the practical side", "the emotional cost",
    "what we would change", "where it leads next",
)
TURN_POOL = (
    "I keep coming back to {topic} — it touches how I plan my whole day.",
    "Honestly, {topic} scares me a little, but in a useful way.",
    "When I think about {topic}, I remember why I started.",
    "You put that well. For me {topic} is tied up with my bigger goal.",
    "Maybe {topic} is something we should both experiment with this week.",
    "That changes how I see {topic}; I had not considered your angle.",
)
TAKEAWAY_POOL = (
    "I left with a clearer sense of what to try tomorrow",
    "it pressed on my usual worries in a good way",
    "I felt understood, which is rare for me",
    "it gave me a concrete idea for my next project",
)
REASON_ACCEPT = (
    "I value {inviter}'s preference for in-depth conversations",
    "time with {inviter} usually leaves me with new ideas",
    "{inviter} sees my work from an angle I cannot",
)
REASON_REJECT = (
    "I need that time to protect my own project",
    "too much social time drains me this week",
)
ULTIMATE_POOL = (
    "create work that bridges {field} and everyday life",
    "become a trusted voice in {field}",
    "finish a defining project in {field}",
)
DESCRIPTIONS = {
    "Learning": ("studying source material", "working through a difficult chapter", "reviewing notes"),
    "Work": ("pushing the main project forward", "clearing the task backlog", "drafting a report"),
    "Exercise": ("doing a steady workout", "stretching and light cardio"),
    "Relaxation": ("unwinding and people-watching", "taking a slow walk", "listening to music"),
    "Social": ("catching up with whoever is around", "sharing a table and conversation"),
    "Appointment": ("meeting as agreed", "keeping a planned meetup"),
    "Meal": ("having an unhurried meal", "eating and recharging"),
    "Rest": ("resting and journaling", "winding down for the night"),
    "Creative": ("sketching new ideas", "working on the personal piece"),
    "Errand": ("picking up supplies", "running a small errand"),
}


def _pick(h: int, pool):
    return pool[h % len(pool)]


def _words(text: str) -> set[str]:
    return {w.strip(".,;:!?()'\"").lower() for w in text.split() if len(w) > 4}


def _ext_level(text: str) -> str:
    low = text.lower()
    if any(w in low for w in EXT_LOW_WORDS) or "low extraversion" in low:
        return "low"
    if any(w in low for w in EXT_HIGH_WORDS) or "high extraversion" in low:
        return "high"
    return "moderate"


def respond(kind: PromptKind, context: dict, seed: int) -> dict:
    h = mix(seed, kind.value, canonical_context(context))
    handler = _HANDLERS[kind]
    return handler(context, seed, h)


# --- character ---------------------------------------------------------------

def _char_init(ctx, seed, h):
    brief = ctx["brief"]
    low = brief.lower()
    tokens = [t.strip(".,;:!?()'\"") for t in brief.split()]
    name = next(
        (t for t in reversed(tokens)
         if t[:1].isupper() and t[1:].islower() and len(t) > 2),
        _pick(h, ("Alex", "Robin", "Casey")),
    )
    low_tokens = {t.lower() for t in tokens}
    profession = next(
        (v for k, v in PROFESSIONS.items()
         if (k in low_tokens if len(k) <= 2 else k in low)),
        _pick(h >> 3, PROFESSION_POOL),
    )
    ext = _ext_level(brief)
    openness = "high" if any(w in low for w in OPEN_WORDS) else _pick(h >> 5, ("moderate", "high"))
    other = _pick(h >> 7, OTHER_FIELDS)
    field = profession.split()[-1] if "student" not in profession else other
    ultimate = _pick(h >> 9, ULTIMATE_POOL).format(field=field)
    traits = {
        "low": f"Shows low extraversion: reserved, speaks only when sure, recharges alone. "
               f"Openness is {openness}; conscientious and methodical about {profession} work.",
        "high": f"Shows high extraversion: enthusiastic, seeks people out, thinks aloud. "
                f"Openness is {openness}; drawn to new experiences over routine.",
        "moderate": f"Shows moderate extraversion: comfortable in company but values solitude. "
                    f"Openness is {openness}; steady and self-directed in {profession} work.",
    }[ext]
    venues = list(SOCIAL_VENUES if ext == "high" else QUIET_VENUES)
    return {
        "basic_info": {
            "name": name,
            "gender": _pick(h >> 11, ("female", "male", "nonbinary")),
            "age": str(19 + (h >> 13) % 14),
            "profession": profession,
        },
        "current_state": f"Beginning a stretch of ordinary days as a {profession}, "
                         f"alert to how routine and company shape the mood. {_pick(h >> 15, STATE_POOL)}",
        "traits": traits,
        "conflict": f"Feels torn between focused {profession} work and an interdisciplinary pull "
                    f"toward {other}, unsure how to honor both.",
        "preference": {
            "ultimate_goal": ultimate,
            "long_term_goal": f"Over the coming years, build the body of work needed to {ultimate}",
            "short_term_goal": f"This week, take one concrete step to {ultimate}",
            "daily_routine": "Morning focus block, shared midday meal, afternoon practice, quiet evening.",
            "hobbies": sorted({_pick(h >> 17, HOBBY_POOL), _pick(h >> 19, HOBBY_POOL)}),
            "venue_preference": venues,
        },
    }


def _char_summary(ctx, seed, h):
    cs = json.loads(ctx["structure"])
    pref = cs["preference"]
    return {
        "dimensions": {
            "basic_info": ", ".join(f"{k}={v}" for k, v in sorted(cs["basic_info"].items())),
            "current_state": cs["current_state"],
            "traits": cs["traits"],
            "conflict": cs["conflict"],
            "preference": (f"aims to {pref['ultimate_goal']}; short-term {pref['short_term_goal']}; "
                           f"hobbies {', '.join(pref['hobbies'])}; "
                           f"prefers {', '.join(pref['venue_preference'])}"),
        }
    }


# --- planning ----------------------------------------------------------------

def _affording(world_json: str, goal: str) -> list[str]:
    return [p["place"] for p in json.loads(world_json) if goal in p["goals"]]


def _plan_item(hh, goal: str, world: str, duration: int, extra=None):
    places = _affording(world, goal)
    item = {
        "goal": goal,
        "place": _pick(hh, places) if places else "-",
        "duration_min": duration,
        "description": _pick(hh >> 4, DESCRIPTIONS[goal]),
        "motivation": f"keeps the {goal.lower()} side of my routine alive and serves my bigger goal",
    }
    if extra:
        item.update(extra)
    return item


def _plan_day(ctx, seed, h):
    # The plan shape is keyed off (summary, insight) only: with a static
    # character and no insight the agent settles into the same day, while an
    # evolving character keeps producing new mixes.
    hp = mix(seed, "PLAN_DAY-shape", ctx["summary"], ctx["insight"])
    summary = ctx["summary"]
    world = ctx["world"]
    others = [o for o in json.loads(ctx["others"]) if o]
    ext = _ext_level(summary)
    low = summary.lower()
    if any(k in low for k in ("novelist", "writer", "filmmaker", "painter", "musician", "illustrator")):
        craft = "Creative"
    elif "student" in low:
        craft = "Learning"
    else:
        craft = "Work"
    items = [
        _plan_item(hp, "Meal", world, 30),
        _plan_item(hp >> 3, craft, world, 60 + 30 * ((hp >> 6) % 3)),
    ]
    if (hp >> 8) % 2:
        items.append(_plan_item(hp >> 9, "Exercise", world, 60))
    items.append(_plan_item(hp >> 12, "Meal", world, 45))
    items.append(_plan_item(hp >> 14, _pick(hp >> 15, (craft, "Learning", "Errand", "Creative")), world, 75))
    social_n = {"low": (hp >> 17) % 2, "moderate": 1, "high": 1 + (hp >> 17) % 2}[ext]
    for i in range(social_n):
        hh = hp >> (19 + 3 * i)
        if ext == "high" and others and i == 0 and (hp >> 26) % 2 == 0:
            partner = _pick(hh, others)
            items.append(_plan_item(hh, "Appointment", world, 60, {"partner": partner}))
        else:
            items.append(_plan_item(hh, "Social", world, 45))
    if (hp >> 29) % 2:
        items.append(_plan_item(hp >> 30, "Relaxation", world, 60))
    items.append(_plan_item(hp >> 33, "Rest", world, 60))
    return {"items": items}


def _plan_revise(ctx, seed, h):
    # Emotional swings and blocked venues both resolve toward recovery time.
    world = ctx["world"]
    goal = "Relaxation" if _affording(world, "Relaxation") else "Rest"
    places = _affording(world, goal)
    squares = [p for p in places if "square" in p.lower()]
    place = squares[0] if squares else (_pick(h, places) if places else "-")
    return {"items": [{
        "goal": goal,
        "place": place,
        "duration_min": 45,
        "description": f"taking time to settle down after {ctx['reason']}",
        "motivation": "restoring balance before returning to the plan",
    }]}


# --- social ------------------------------------------------------------------

def _invite_send(ctx, seed, h):
    topic = _pick(h, TOPIC_INTROS)
    return {"topic": topic,
            "reason": f"I'd like {ctx['partner']}'s company at {ctx['place']} to talk about {topic}."}


def _invite_decide(ctx, seed, h):
    benefit = round(unit_float(h), 4)
    accept = benefit < 0.8
    if accept:
        reason = _pick(h >> 5, REASON_ACCEPT).format(inviter=ctx["inviter"])
    else:
        reason = _pick(h >> 5, REASON_REJECT)
    return {"accept": accept, "reason": reason, "benefit": benefit}


def _action_describe(ctx, seed, h):
    return {"description": f"{ctx['agent']} is {ctx['activity']} at the {ctx['place']}."}


def _emotion_update(ctx, seed, h):
    text = (ctx["action"] + " " + ctx["conflict"]).lower()
    pos = sum(1 for w in POSITIVE_WORDS if w in text)
    neg = sum(1 for w in NEGATIVE_WORDS if w in text)
    category = max(1, min(7, 4 + pos - neg + (h % 3) - 1))
    feelings = {
        1: "I feel hollowed out, like nothing I do today will matter.",
        2: "I feel a cold edge of fear about where this is heading.",
        3: "I feel anxious and a little self-doubtful about my footing.",
        4: "I feel calm, just letting the moment pass through me.",
        5: "I feel content; this fits who I am trying to become.",
        6: "I feel genuinely happy with how this is going.",
        7: "I feel excited — full of anticipation for what comes next.",
    }
    return {"category": category, "feeling": feelings[category]}


def _dialog_topic(ctx, seed, h):
    memory = json.loads(ctx["memory"])
    if not memory:
        return {"topic": _pick(h, TOPIC_INTROS)}
    last = " ".join(str(memory[-1]).split()[:8])
    return {"topic": f"{_pick(mix(seed, len(memory), last), TOPIC_ASPECTS)} of {last}"}


def _dialog_turn(ctx, seed, h):
    return {"utterance": _pick(h, TURN_POOL).format(topic=ctx["topic"])}


def _dialog_summary(ctx, seed, h):
    return {"summary": f"We talked about {ctx['topic']}; {_pick(h, TAKEAWAY_POOL)}."}


def _partner_select(ctx, seed, h):
    candidates = json.loads(ctx["candidates"])
    partner = _pick(h, sorted(candidates))
    return {"partner": partner,
            "reason": f"{partner}'s perspective speaks to what I am wrestling with right now."}


# --- cognition ---------------------------------------------------------------

def _memory_filter(ctx, seed, h):
    records = json.loads(ctx["records"])
    trait_words = _words(ctx["traits"])
    conflict_words = _words(ctx["conflict"])
    kept = []
    for i, rec in enumerate(records):
        rw = _words(str(rec))
        score_c = len(rw & conflict_words)
        score_t = len(rw & trait_words)
        if score_c + score_t > 0:
            snippet = " ".join(str(rec).split()[:10])
            kept.append({
                "index": i,
                "summary": f"I keep returning to {snippet} — it touched something in me.",
                "salience": "conflict" if score_c >= score_t else "traits",
            })
    if not kept and records:
        i = h % len(records)
        kept.append({
            "index": i,
            "summary": f"An ordinary moment stayed with me: {' '.join(str(records[i]).split()[:10])}",
            "salience": "current_state",
        })
    return {"kept": kept}


def _memory_blur(ctx, seed, h):
    records = json.loads(ctx["records"])
    heads = ", ".join(" ".join(str(r).split()[:4]) for r in records[:4])
    return {"summary": f"A blurred stretch of days — fragments remain: {heads}…"}


def _insight(ctx, seed, h):
    hh = mix(seed, "INSIGHT", ctx["events"], ctx["structure"])
    return {"reflection": f"Reflecting on today, I realize {_pick(hh, INSIGHT_POOL)}."}


# --- growth ------------------------------------------------------------------

def _growth_state(ctx, seed, h):
    insight = ctx["insight"]
    return {"current_state": f"{_pick(h, STATE_POOL)} What stays with me: {insight}"}


def _growth_feature(ctx, seed, h):
    cs = json.loads(ctx["structure"])
    base = cs["traits"].split(". ")[0].rstrip(".")
    return {"traits": f"{base}. Lately showing {_pick(h, SHIFT_POOL)}."}


def _growth_conflict(ctx, seed, h):
    cs = json.loads(ctx["structure"])
    head = " ".join(cs["conflict"].split()[:9]).rstrip(",.")
    return {"conflict": f"{head} — though {_pick(h, CONFLICT_EVOLUTION)}."}


def _growth_preference(ctx, seed, h):
    cs = json.loads(ctx["structure"])
    pref = dict(cs["preference"])
    ultimate = pref["ultimate_goal"]
    step = _pick(h, ("sketch", "share", "finish", "rework", "discuss"))
    pref["short_term_goal"] = f"Next, {step} one small piece that moves me to {ultimate}"
    hobby = _pick(h >> 4, HOBBY_POOL)
    if hobby not in pref["hobbies"] and (h >> 8) % 3 == 0:
        pref["hobbies"] = sorted(pref["hobbies"] + [hobby])
    return {"preference": pref}


# --- assessment & chat -------------------------------------------------------

def _bfi_fill(ctx, seed, h):
    structures = json.loads(ctx["structures"])
    items = json.loads(ctx["items"])
    sheets = []
    for struct in structures:
        sj = json.dumps(struct, sort_keys=True)
        revision = int(struct.get("revision", 0))
        answers = []
        for i, item in enumerate(items):
            hi = mix(seed, "BFI", sj, i, item)
            if i == 0:
                # Anchor item: shifts with every revision so an evolving
                # character never produces two identical consecutive sheets.
                answers.append(1 + (hi + revision) % 5)
            else:
                answers.append(1 + hi % 5)
        sheets.append(answers)
    return {"sheets": sheets}


def _chat_reply(ctx, seed, h):
    text = " ".join(ctx["text"].split()[:12])
    return {"reply": f"{_pick(h, TAKEAWAY_POOL).capitalize()}. You asked about \"{text}\" — "
                     f"that sits close to what I have been working through today."}


_HANDLERS = {
    PromptKind.CHAR_INIT: _char_init,
    PromptKind.CHAR_SUMMARY: _char_summary,
    PromptKind.PLAN_DAY: _plan_day,
    PromptKind.PLAN_REVISE: _plan_revise,
    PromptKind.INVITE_SEND: _invite_send,
    PromptKind.INVITE_DECIDE: _invite_decide,
    PromptKind.ACTION_DESCRIBE: _action_describe,
    PromptKind.EMOTION_UPDATE: _emotion_update,
    PromptKind.DIALOG_TOPIC: _dialog_topic,
    PromptKind.DIALOG_TURN: _dialog_turn,
    PromptKind.DIALOG_SUMMARY: _dialog_summary,
    PromptKind.PARTNER_SELECT: _partner_select,
    PromptKind.MEMORY_FILTER: _memory_filter,
    PromptKind.MEMORY_BLUR: _memory_blur,
    PromptKind.INSIGHT: _insight,
    PromptKind.GROWTH_STATE: _growth_state,
    PromptKind.GROWTH_FEATURE: _growth_feature,
    PromptKind.GROWTH_CONFLICT: _growth_conflict,
    PromptKind.GROWTH_PREFERENCE: _growth_preference,
    PromptKind.BFI_FILL: _bfi_fill,
    PromptKind.CHAT_REPLY: _chat_reply,
}
