import type { CharacterStructure, LogRecord, StateSnapshot } from "../src/types.js";

let seq = 0;

export function resetSeq(value = 0): void {
  seq = value;
}

export function record(
  type: string,
  payload: Record<string, unknown>,
  opts: { agent?: string; day?: number; tick?: number; seq?: number } = {},
): LogRecord {
  const rec: LogRecord = {
    v: 1,
    seq: opts.seq ?? seq,
    day: opts.day ?? 1,
    tick: opts.tick ?? 0,
    agent: opts.agent ?? "ana",
    type,
    payload,
  };
  if (opts.seq === undefined) seq += 1;
  return rec;
}

export function structure(revision = 0): CharacterStructure {
  return {
    basic_info: { name: "Ana", gender: "female", age: "30", profession: "painter" },
    current_state: `state r${revision}`,
    traits: "steady",
    conflict: "none",
    preference: { ultimate_goal: "paint" },
    revision,
  };
}

export function plan(day: number, agent = "ana") {
  return {
    agent,
    day,
    entries: [
      {
        start: 390,
        end: 450,
        goal: "Meal",
        place: "cafe",
        description: "breakfast",
        motivation: "routine",
        status: "pending",
        partner: "",
      },
    ],
  };
}

export function emotionRecord(
  category: number,
  previous: number | null,
  opts: { agent?: string; day?: number; tick?: number } = {},
): LogRecord {
  return record(
    "emotion",
    {
      state: { category, feeling: `feel ${category}`, day: opts.day ?? 1, tick: opts.tick ?? 0 },
      action: "doing something",
      previous:
        previous === null
          ? null
          : { category: previous, feeling: "earlier", day: opts.day ?? 1, tick: 0 },
    },
    opts,
  );
}

export function snapshot(): StateSnapshot {
  return {
    day: 1,
    tick: 4,
    clock: "07:00",
    paused: false,
    agents: {
      ana: { position: [3, 4], emotion: null, name: "Ana" },
      bo: { position: [10, 12], emotion: null, name: "Bo" },
    },
    places: [
      { name: "cafe", building: "center", x: 5, y: 5, capacity: 3, affordances: ["Meal"] },
    ],
    grid: { width: 64, height: 64 },
  };
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
