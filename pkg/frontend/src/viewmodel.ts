/** The UI's single source of truth: a view model folded from server data.
 *
 * Every field is derived from the server (bootstrap snapshot + event
 * stream); the reducer never invents state. Records are applied once, in
 * order; anything at or below `lastSeq` is dropped, which makes reconnect
 * replays and duplicate delivery harmless.
 */
import type { StreamStatus } from "./api.js";
import type {
  CharacterStructure,
  DailyPlan,
  EnvDiff,
  GrowthDelta,
  InsightRecord,
  LogRecord,
  LongTermRecord,
  PlaceInfo,
  StateSnapshot,
} from "./types.js";
import type { RowError } from "./csv.js";

export interface EmotionPoint {
  tick: number;
  category: number;
  feeling: string;
  /** True when this update jumped >= 3 categories, i.e. triggered a replan. */
  replan: boolean;
}

export interface GrowthView {
  day: number;
  delta: GrowthDelta;
  structure: CharacterStructure;
}

export interface ChatMessage {
  role: "user" | "agent";
  text: string;
  day: number;
  tick: number;
}

export interface DialogEvent {
  day: number;
  tick: number;
  partner: string;
  topic: string;
}

export interface AgentView {
  id: string;
  name: string;
  position: [number, number] | null;
  structure: CharacterStructure | null;
  planDraft: DailyPlan | null;
  plan: DailyPlan | null;
  emotionTrace: EmotionPoint[]; // current day only
  memories: LongTermRecord[];
  insights: InsightRecord[];
  growth: GrowthView[];
  dialogs: DialogEvent[];
}

export interface Notice {
  kind: "busy" | "validation" | "info" | "error";
  message: string;
}

export interface EnvEditorState {
  buffer: string;
  errors: RowError[];
  stagedDiff: EnvDiff | null;
  lastSubmitted: string | null;
  notice: string | null;
}

export interface ViewModel {
  lastSeq: number;
  day: number;
  tick: number;
  clock: string;
  paused: boolean;
  connection: StreamStatus;
  grid: { width: number; height: number };
  places: PlaceInfo[];
  agents: Record<string, AgentView>;
  selectedAgent: string | null;
  chat: Record<string, ChatMessage[]>;
  env: EnvEditorState;
  notice: Notice | null;
}

export function emptyViewModel(): ViewModel {
  return {
    lastSeq: -1,
    day: 0,
    tick: 0,
    clock: "",
    paused: false,
    connection: "stale",
    grid: { width: 64, height: 64 },
    places: [],
    agents: {},
    selectedAgent: null,
    chat: {},
    env: { buffer: "", errors: [], stagedDiff: null, lastSubmitted: null, notice: null },
    notice: null,
  };
}

function agentView(vm: ViewModel, id: string): AgentView {
  let view = vm.agents[id];
  if (!view) {
    view = {
      id,
      name: id,
      position: null,
      structure: null,
      planDraft: null,
      plan: null,
      emotionTrace: [],
      memories: [],
      insights: [],
      growth: [],
      dialogs: [],
    };
    vm.agents[id] = view;
  }
  return view;
}

/** Seed the view model from GET /state so a freshly opened UI shows the
 * same world a long-running one does (UI statelessness). */
export function applySnapshot(vm: ViewModel, snap: StateSnapshot): ViewModel {
  vm.day = snap.day;
  vm.tick = snap.tick;
  vm.clock = snap.clock;
  vm.paused = snap.paused;
  vm.places = snap.places;
  vm.grid = snap.grid;
  for (const [id, info] of Object.entries(snap.agents)) {
    const view = agentView(vm, id);
    view.name = info.name;
    view.position = info.position;
  }
  return vm;
}

/** Fold one log record into the view model. Returns true when the record
 * was applied, false when its sequence number was already seen. */
export function applyRecord(vm: ViewModel, rec: LogRecord): boolean {
  if (rec.seq <= vm.lastSeq) return false;
  vm.lastSeq = rec.seq;
  if (rec.day > vm.day) startNewDay(vm, rec.day);
  vm.day = rec.day;
  vm.tick = rec.tick;
  const p = rec.payload as Record<string, any>;
  switch (rec.type) {
    case "char_init": {
      const view = agentView(vm, rec.agent);
      view.structure = p.structure as CharacterStructure;
      view.name = view.structure?.basic_info?.name ?? rec.agent;
      view.position = (p.pos as [number, number]) ?? view.position;
      break;
    }
    case "plan":
      agentView(vm, rec.agent).planDraft = p.plan as DailyPlan;
      break;
    case "plan_final":
      agentView(vm, rec.agent).plan = p.plan as DailyPlan;
      break;
    case "move":
      agentView(vm, rec.agent).position = p.pos as [number, number];
      break;
    case "action":
      if (p.plan) agentView(vm, rec.agent).plan = p.plan as DailyPlan;
      break;
    case "replan":
      if (p.plan) agentView(vm, rec.agent).plan = p.plan as DailyPlan;
      break;
    case "emotion": {
      const state = p.state as { category: number; feeling: string };
      const previous = p.previous as { category: number } | null;
      agentView(vm, rec.agent).emotionTrace.push({
        tick: rec.tick,
        category: state.category,
        feeling: state.feeling,
        replan:
          previous !== null && Math.abs(state.category - previous.category) >= 3,
      });
      break;
    }
    case "dialog": {
      const conv = p.conversation as {
        participants: string[];
        topic: string;
        turns: [string, string][];
      };
      if (conv.participants.includes("user")) {
        const agentId = conv.participants.find((x) => x !== "user") ?? rec.agent;
        const transcript = (vm.chat[agentId] ??= []);
        for (const [speaker, text] of conv.turns) {
          transcript.push({
            role: speaker === "user" ? "user" : "agent",
            text,
            day: rec.day,
            tick: rec.tick,
          });
        }
      } else {
        for (const id of conv.participants) {
          const partner = conv.participants.find((x) => x !== id) ?? "";
          agentView(vm, id).dialogs.push({
            day: rec.day,
            tick: rec.tick,
            partner,
            topic: conv.topic,
          });
        }
      }
      break;
    }
    case "memory":
      agentView(vm, rec.agent).memories = p.store as LongTermRecord[];
      break;
    case "insight":
      agentView(vm, rec.agent).insights.push(p as unknown as InsightRecord);
      break;
    case "growth": {
      const view = agentView(vm, rec.agent);
      const growth: GrowthView = {
        day: rec.day,
        delta: p.delta as GrowthDelta,
        structure: p.structure as CharacterStructure,
      };
      view.growth.push(growth);
      view.structure = growth.structure;
      break;
    }
    case "env_staged":
      vm.env.stagedDiff = p.diff as EnvDiff;
      break;
    default:
      break; // config, invite, command, bfi, day_end, lm: no view change
  }
  return true;
}

function startNewDay(vm: ViewModel, day: number): void {
  for (const view of Object.values(vm.agents)) {
    view.emotionTrace = [];
    view.planDraft = null;
    view.plan = null;
  }
  if (vm.env.stagedDiff !== null && vm.env.stagedDiff.effective_day <= day) {
    vm.env.stagedDiff = null; // edit has taken effect
  }
}

export function selectAgent(vm: ViewModel, agentId: string | null): ViewModel {
  vm.selectedAgent = agentId;
  return vm;
}
