"""Language-model client: one call surface, two backends.

The scripted backend is a pure function of (kind, canonical context, run
seed) and makes whole runs reproducible offline; the HTTP backend talks to
any chat-completion endpoint. Every request/response pair can be mirrored
into the event log by installing a log hook.
"""
from __future__ import annotations

import enum
import json
import os
import time
from dataclasses import dataclass, field
from typing import Callable

from .hashing import canonical_context


class PromptKind(enum.Enum):
    CHAR_INIT = "CHAR_INIT"
    CHAR_SUMMARY = "CHAR_SUMMARY"
    PLAN_DAY = "PLAN_DAY"
    PLAN_REVISE = "PLAN_REVISE"
    INVITE_SEND = "INVITE_SEND"
    INVITE_DECIDE = "INVITE_DECIDE"
    ACTION_DESCRIBE = "ACTION_DESCRIBE"
    EMOTION_UPDATE = "EMOTION_UPDATE"
    DIALOG_TOPIC = "DIALOG_TOPIC"
    DIALOG_TURN = "DIALOG_TURN"
    DIALOG_SUMMARY = "DIALOG_SUMMARY"
    PARTNER_SELECT = "PARTNER_SELECT"
    MEMORY_FILTER = "MEMORY_FILTER"
    MEMORY_BLUR = "MEMORY_BLUR"
    INSIGHT = "INSIGHT"
    GROWTH_STATE = "GROWTH_STATE"
    GROWTH_FEATURE = "GROWTH_FEATURE"
    GROWTH_CONFLICT = "GROWTH_CONFLICT"
    GROWTH_PREFERENCE = "GROWTH_PREFERENCE"
    BFI_FILL = "BFI_FILL"
    CHAT_REPLY = "CHAT_REPLY"


REQUIRED_CONTEXT: dict[PromptKind, tuple[str, ...]] = {
    PromptKind.CHAR_INIT: ("brief",),
    PromptKind.CHAR_SUMMARY: ("structure", "emphasis", "budget"),
    PromptKind.PLAN_DAY: ("summary", "world", "insight", "memory_digest", "others"),
    PromptKind.PLAN_REVISE: ("summary", "world", "reason", "window"),
    PromptKind.INVITE_SEND: ("summary", "partner", "slot", "place"),
    PromptKind.INVITE_DECIDE: ("summary", "inviter", "topic", "slot", "place", "conflict_desc"),
    PromptKind.ACTION_DESCRIBE: ("agent", "activity", "place"),
    PromptKind.EMOTION_UPDATE: ("action", "conflict", "previous"),
    PromptKind.DIALOG_TOPIC: ("summary", "partner", "memory"),
    PromptKind.DIALOG_TURN: ("topic", "speaker", "turn"),
    PromptKind.DIALOG_SUMMARY: ("topic", "transcript", "perspective"),
    PromptKind.PARTNER_SELECT: ("summary", "candidates", "memory"),
    PromptKind.MEMORY_FILTER: ("records", "traits", "conflict"),
    PromptKind.MEMORY_BLUR: ("records",),
    PromptKind.INSIGHT: ("events", "memory", "structure", "day"),
    PromptKind.GROWTH_STATE: ("structure", "insight", "day_summary"),
    PromptKind.GROWTH_FEATURE: ("structure", "insight", "day_summary"),
    PromptKind.GROWTH_CONFLICT: ("structure", "insight", "day_summary"),
    PromptKind.GROWTH_PREFERENCE: ("structure", "insight", "day_summary"),
    PromptKind.BFI_FILL: ("structures", "items"),
    PromptKind.CHAT_REPLY: ("summary", "text", "memory"),
}


class RequestError(ValueError):
    """Missing or malformed context for a request."""


class BackendError(RuntimeError):
    """Transport-level failure after retries."""


class DecodeError(RuntimeError):
    """Backend output did not match the kind's response schema."""


@dataclass(frozen=True)
class PromptRequest:
    kind: PromptKind
    context: dict
    agent_id: str
    day: int
    tick: int

    def canonical(self) -> str:
        return canonical_context(self.context)


@dataclass(frozen=True)
class CompletionResponse:
    payload: dict
    backend_id: str
    latency_ms: float = 0.0


def _is_str(v) -> bool:
    return isinstance(v, str) and bool(v.strip())


def validate_payload(kind: PromptKind, payload: dict) -> None:
    """Raise DecodeError unless *payload* matches the kind's response schema."""
    def need(cond, msg):
        if not cond:
            raise DecodeError(f"{kind.value}: {msg}")

    need(isinstance(payload, dict), "payload not an object")
    if kind is PromptKind.CHAR_INIT:
        need(isinstance(payload.get("basic_info"), dict), "basic_info missing")
        for f in ("current_state", "traits", "conflict"):
            need(_is_str(payload.get(f)), f"{f} missing")
        pref = payload.get("preference")
        need(isinstance(pref, dict), "preference missing")
        for f in ("ultimate_goal", "long_term_goal", "short_term_goal", "daily_routine"):
            need(_is_str(pref.get(f)), f"preference.{f} missing")
        need(isinstance(pref.get("hobbies"), list) and pref["hobbies"], "hobbies missing")
        need(isinstance(pref.get("venue_preference"), list) and pref["venue_preference"], "venue_preference missing")
    elif kind is PromptKind.CHAR_SUMMARY:
        dims = payload.get("dimensions")
        need(isinstance(dims, dict), "dimensions missing")
        for f in ("basic_info", "current_state", "traits", "conflict", "preference"):
            need(_is_str(dims.get(f)), f"dimensions.{f} missing")
    elif kind in (PromptKind.PLAN_DAY, PromptKind.PLAN_REVISE):
        items = payload.get("items")
        need(isinstance(items, list), "items missing")
        for it in items:
            need(isinstance(it, dict), "item not an object")
            for f in ("goal", "place", "description", "motivation"):
                need(_is_str(it.get(f)), f"item.{f} missing")
            need(isinstance(it.get("duration_min"), int) and it["duration_min"] > 0, "item.duration_min invalid")
    elif kind is PromptKind.INVITE_SEND:
        need(_is_str(payload.get("topic")), "topic missing")
        need(_is_str(payload.get("reason")), "reason missing")
    elif kind is PromptKind.INVITE_DECIDE:
        need(isinstance(payload.get("accept"), bool), "accept missing")
        need(_is_str(payload.get("reason")), "reason missing")
        need(isinstance(payload.get("benefit"), (int, float)), "benefit missing")
    elif kind is PromptKind.ACTION_DESCRIBE:
        need(_is_str(payload.get("description")), "description missing")
    elif kind is PromptKind.EMOTION_UPDATE:
        need(isinstance(payload.get("category"), int), "category missing")
        need(_is_str(payload.get("feeling")), "feeling missing")
    elif kind is PromptKind.DIALOG_TOPIC:
        need(_is_str(payload.get("topic")), "topic missing")
    elif kind is PromptKind.DIALOG_TURN:
        need(_is_str(payload.get("utterance")), "utterance missing")
    elif kind is PromptKind.DIALOG_SUMMARY:
        need(_is_str(payload.get("summary")), "summary missing")
    elif kind is PromptKind.PARTNER_SELECT:
        need(_is_str(payload.get("partner")), "partner missing")
        need(_is_str(payload.get("reason")), "reason missing")
    elif kind is PromptKind.MEMORY_FILTER:
        kept = payload.get("kept")
        need(isinstance(kept, list), "kept missing")
        for k in kept:
            need(isinstance(k.get("index"), int), "kept.index missing")
            need(_is_str(k.get("summary")), "kept.summary missing")
            need(_is_str(k.get("salience")), "kept.salience missing")
    elif kind is PromptKind.MEMORY_BLUR:
        need(_is_str(payload.get("summary")), "summary missing")
    elif kind is PromptKind.INSIGHT:
        need(_is_str(payload.get("reflection")), "reflection missing")
    elif kind is PromptKind.GROWTH_STATE:
        need(_is_str(payload.get("current_state")), "current_state missing")
    elif kind is PromptKind.GROWTH_FEATURE:
        need(_is_str(payload.get("traits")), "traits missing")
    elif kind is PromptKind.GROWTH_CONFLICT:
        need(_is_str(payload.get("conflict")), "conflict missing")
    elif kind is PromptKind.GROWTH_PREFERENCE:
        need(isinstance(payload.get("preference"), dict), "preference missing")
    elif kind is PromptKind.BFI_FILL:
        sheets = payload.get("sheets")
        need(isinstance(sheets, list) and sheets, "sheets missing")
        for sheet in sheets:
            need(isinstance(sheet, list) and len(sheet) == 44, "sheet must have 44 answers")
            need(all(isinstance(a, int) and 1 <= a <= 5 for a in sheet), "answers must be 1..5")
    elif kind is PromptKind.CHAT_REPLY:
        need(_is_str(payload.get("reply")), "reply missing")


class ScriptedBackend:
    """Deterministic stand-in for a language model; see :mod:`evosim.scripted`."""

    def __init__(self, seed: int):
        self.seed = seed

    @property
    def backend_id(self) -> str:
        return f"scripted:{self.seed}"

    def complete(self, req: PromptRequest) -> dict:
        from . import scripted  # local import avoids a cycle at module load

        return scripted.respond(req.kind, req.context, self.seed)


class HttpBackend:
    """Generic chat-completion client (base URL, model and key from env/config)."""

    def __init__(self, base_url: str | None = None, model: str | None = None,
                 api_key: str | None = None, timeout: float = 30.0, retries: int = 2):
        self.base_url = (base_url or os.environ.get("LM_BASE_URL", "")).rstrip("/")
        self.model = model or os.environ.get("LM_MODEL", "")
        self.api_key = api_key or os.environ.get("LM_API_KEY", "")
        self.timeout = timeout
        self.retries = retries
        if not self.base_url:
            raise BackendError("LM_BASE_URL not configured")

    @property
    def backend_id(self) -> str:
        return f"http:{self.model}"

    def _post(self, messages: list[dict]) -> str:
        import httpx

        last = None
        for _ in range(self.retries + 1):
            try:
                resp = httpx.post(
                    f"{self.base_url}/chat/completions",
                    json={"model": self.model, "messages": messages,
                          "response_format": {"type": "json_object"}},
                    headers={"Authorization": f"Bearer {self.api_key}"} if self.api_key else {},
                    timeout=self.timeout,
                )
                if resp.status_code >= 500:
                    last = BackendError(f"server error {resp.status_code}")
                    continue
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except httpx.TimeoutException as exc:
                last = BackendError(f"timeout: {exc}")
            except httpx.HTTPError as exc:
                raise BackendError(str(exc)) from exc
        raise last or BackendError("request failed")

    def complete(self, req: PromptRequest) -> dict:
        system = (
            f"You are the {req.kind.value} module of an agent simulation. "
            "Reply with a single JSON object matching the documented schema for this task."
        )
        messages = [{"role": "system", "content": system},
                    {"role": "user", "content": req.canonical()}]
        raw = self._post(messages)
        try:
            payload = json.loads(raw)
            validate_payload(req.kind, payload)
            return payload
        except (json.JSONDecodeError, DecodeError) as exc:
            # One structured-output repair attempt, then fail.
            messages.append({"role": "assistant", "content": raw})
            messages.append({"role": "user", "content": f"Invalid output ({exc}). Reply with corrected JSON only."})
            raw = self._post(messages)
            try:
                payload = json.loads(raw)
            except json.JSONDecodeError as exc2:
                raise DecodeError(f"unparseable backend output: {exc2}") from exc2
            validate_payload(req.kind, payload)
            return payload


@dataclass
class LmClient:
    backend: ScriptedBackend | HttpBackend
    log_hook: Callable[[PromptRequest, CompletionResponse], None] | None = None

    def complete(self, req: PromptRequest) -> CompletionResponse:
        required = REQUIRED_CONTEXT[req.kind]
        missing = [f for f in required if f not in req.context]
        if missing:
            raise RequestError(f"{req.kind.value} missing context fields: {', '.join(missing)}")
        t0 = time.perf_counter()
        payload = self.backend.complete(req)
        validate_payload(req.kind, payload)
        resp = CompletionResponse(
            payload=payload,
            backend_id=self.backend.backend_id,
            latency_ms=(time.perf_counter() - t0) * 1000.0,
        )
        if self.log_hook is not None:
            self.log_hook(req, resp)
        return resp
