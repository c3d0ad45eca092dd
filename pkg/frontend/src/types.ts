/** Wire types for the simulation server's HTTP/SSE API. */

export interface LogRecord {
  v: number;
  seq: number;
  day: number;
  tick: number;
  agent: string;
  type: string;
  payload: Record<string, unknown>;
}

export interface PlanEntry {
  start: number;
  end: number;
  goal: string;
  place: string;
  description: string;
  motivation: string;
  status: string;
  partner: string;
}

export interface DailyPlan {
  agent: string;
  day: number;
  entries: PlanEntry[];
}

export interface EmotionState {
  category: number; // 1 (Despairing) .. 7 (Excited)
  feeling: string;
  day: number;
  tick: number;
}

export interface BasicInfo {
  name: string;
  gender: string;
  age: string;
  profession: string;
}

export interface CharacterStructure {
  basic_info: BasicInfo;
  current_state: string;
  traits: string;
  conflict: string;
  preference: Record<string, unknown>;
  revision: number;
}

export interface LongTermRecord {
  day: number;
  summary: string;
  salience: string;
  blurred: boolean;
  day_span?: [number, number] | null;
}

export interface InsightRecord {
  day: number;
  reflection: string;
}

export interface DialogMemoryRecord {
  day: number;
  topic: string;
  summary: string;
}

export interface GrowthDelta {
  old_revision: number;
  new_revision: number;
  state_diff: string;
  traits_diff: string;
  conflict_diff: string;
  preference_diff: string;
}

export interface PlaceInfo {
  name: string;
  building: string;
  x: number;
  y: number;
  capacity: number;
  affordances: string[];
}

export interface StateSnapshot {
  day: number;
  tick: number;
  clock: string;
  paused: boolean;
  agents: Record<
    string,
    { position: [number, number]; emotion: EmotionState | null; name: string }
  >;
  places: PlaceInfo[];
  grid: { width: number; height: number };
}

export interface AgentSnapshot {
  structure: CharacterStructure;
  position: [number, number];
  home: string;
  emotion: EmotionState | null;
  plan: DailyPlan | null;
  short_term: unknown[];
  long_term: LongTermRecord[] | null;
  insights: InsightRecord[];
  dialog_memory: Record<string, DialogMemoryRecord[]>;
}

export interface ChatReply {
  agent: string;
  text: string;
  reply: string;
  day: number;
  tick: number;
}

export interface EnvDiff {
  added: string[];
  removed: string[];
  changed: string[];
  effective_day: number;
}

export function isLogRecord(value: unknown): value is LogRecord {
  if (typeof value !== "object" || value === null) return false;
  const r = value as Record<string, unknown>;
  return (
    typeof r.seq === "number" &&
    typeof r.day === "number" &&
    typeof r.tick === "number" &&
    typeof r.agent === "string" &&
    typeof r.type === "string" &&
    typeof r.payload === "object" &&
    r.payload !== null
  );
}
