import { beforeEach, describe, expect, it } from "vitest";

import { applyRecord, applySnapshot, emptyViewModel } from "../src/viewmodel.js";
import type { ViewModel } from "../src/viewmodel.js";
import {
  emotionRecord,
  plan,
  record,
  resetSeq,
  snapshot,
  structure,
} from "./fixtures.js";

let vm: ViewModel;

beforeEach(() => {
  vm = emptyViewModel();
  resetSeq();
});

describe("applySnapshot", () => {
  it("seeds clock, grid, places and agent markers from GET /state", () => {
    applySnapshot(vm, snapshot());
    expect(vm.day).toBe(1);
    expect(vm.clock).toBe("07:00");
    expect(vm.agents.ana?.position).toEqual([3, 4]);
    expect(vm.agents.bo?.name).toBe("Bo");
    expect(vm.places.map((p) => p.name)).toEqual(["cafe"]);
  });
});

describe("applyRecord ordering", () => {
  it("applies records once and advances the sequence cursor", () => {
    const rec = record("move", { pos: [7, 8] });
    expect(applyRecord(vm, rec)).toBe(true);
    expect(vm.lastSeq).toBe(rec.seq);
    expect(vm.agents.ana?.position).toEqual([7, 8]);
  });

  it("suppresses duplicate delivery by sequence number", () => {
    const rec = record("move", { pos: [7, 8] });
    applyRecord(vm, rec);
    applyRecord(vm, record("move", { pos: [9, 9] }));
    // A reconnect replays the first record; the stale position must not win.
    expect(applyRecord(vm, rec)).toBe(false);
    expect(vm.agents.ana?.position).toEqual([9, 9]);
  });

  it("updates day/tick clock from each applied record", () => {
    applyRecord(vm, record("move", { pos: [1, 1] }, { day: 2, tick: 30 }));
    expect(vm.day).toBe(2);
    expect(vm.tick).toBe(30);
  });
});

describe("record folding", () => {
  it("char_init sets structure, display name, and home position", () => {
    applyRecord(
      vm,
      record("char_init", { structure: structure(), home: "dorm", pos: [2, 3] }, { day: 0 }),
    );
    expect(vm.agents.ana?.structure?.revision).toBe(0);
    expect(vm.agents.ana?.name).toBe("Ana");
    expect(vm.agents.ana?.position).toEqual([2, 3]);
  });

  it("keeps draft and final plans distinct", () => {
    applyRecord(vm, record("plan", { stage: "draft", plan: plan(1) }));
    expect(vm.agents.ana?.planDraft?.day).toBe(1);
    expect(vm.agents.ana?.plan).toBeNull();
    applyRecord(vm, record("plan_final", { stage: "final", plan: plan(1) }));
    expect(vm.agents.ana?.plan?.day).toBe(1);
  });

  it("emotion records extend the trace and mark replan-sized jumps", () => {
    applyRecord(vm, emotionRecord(7, null, { tick: 10 }));
    applyRecord(vm, emotionRecord(6, 7, { tick: 20 }));
    applyRecord(vm, emotionRecord(3, 6, { tick: 30 })); // span 3 -> replan
    const trace = vm.agents.ana?.emotionTrace ?? [];
    expect(trace.map((p) => p.category)).toEqual([7, 6, 3]);
    expect(trace.map((p) => p.replan)).toEqual([false, false, true]);
  });

  it("growth records surface an old→new diff and update the structure", () => {
    applyRecord(vm, record("char_init", { structure: structure(0), home: "d", pos: [0, 0] }, { day: 0 }));
    applyRecord(
      vm,
      record("growth", {
        delta: {
          old_revision: 0,
          new_revision: 1,
          state_diff: "calmer",
          traits_diff: "unchanged",
          conflict_diff: "unchanged",
          preference_diff: "unchanged",
        },
        structure: structure(1),
      }),
    );
    const agent = vm.agents.ana!;
    expect(agent.growth).toHaveLength(1);
    expect(agent.growth[0]?.delta.old_revision).toBe(0);
    expect(agent.growth[0]?.delta.new_revision).toBe(1);
    expect(agent.structure?.revision).toBe(1);
  });

  it("memory records replace the long-term store wholesale", () => {
    const store = [
      { day: 1, summary: "a", salience: "traits", blurred: false },
      { day: 1, summary: "b", salience: "traits", blurred: false },
    ];
    applyRecord(vm, record("memory", { new: [store[1]], store }));
    expect(vm.agents.ana?.memories).toEqual(store);
  });

  it("user dialogs land in the chat transcript; agent dialogs in the timeline", () => {
    applyRecord(
      vm,
      record("dialog", {
        conversation: {
          participants: ["ana", "user"],
          topic: "hello",
          turns: [
            ["user", "hello"],
            ["ana", "hi there"],
          ],
        },
      }),
    );
    expect(vm.chat.ana?.map((m) => [m.role, m.text])).toEqual([
      ["user", "hello"],
      ["agent", "hi there"],
    ]);
    applyRecord(
      vm,
      record("dialog", {
        conversation: { participants: ["ana", "bo"], topic: "craft", turns: [] },
      }),
    );
    expect(vm.agents.ana?.dialogs).toEqual([
      { day: 1, tick: 0, partner: "bo", topic: "craft" },
    ]);
    expect(vm.agents.bo?.dialogs[0]?.partner).toBe("ana");
  });

  it("env_staged records publish the pending world diff", () => {
    applyRecord(
      vm,
      record("env_staged", {
        diff: { added: ["arcade"], removed: [], changed: [], effective_day: 2 },
      }, { agent: "" }),
    );
    expect(vm.env.stagedDiff?.added).toEqual(["arcade"]);
  });
});

describe("day rollover", () => {
  it("resets per-day timelines when the day advances", () => {
    applyRecord(vm, record("plan_final", { stage: "final", plan: plan(1) }, { day: 1 }));
    applyRecord(vm, emotionRecord(5, null, { day: 1, tick: 12 }));
    applyRecord(vm, record("move", { pos: [4, 4] }, { day: 2, tick: 0 }));
    expect(vm.agents.ana?.emotionTrace).toEqual([]);
    expect(vm.agents.ana?.plan).toBeNull();
    // Persistent history survives the rollover.
    applyRecord(vm, record("insight", { day: 2, reflection: "r" }, { day: 2, tick: 67 }));
    expect(vm.agents.ana?.insights).toHaveLength(1);
  });

  it("clears the staged env diff once its effective day arrives", () => {
    applyRecord(
      vm,
      record("env_staged", {
        diff: { added: ["arcade"], removed: [], changed: [], effective_day: 2 },
      }, { agent: "", day: 1 }),
    );
    applyRecord(vm, record("move", { pos: [0, 0] }, { day: 2 }));
    expect(vm.env.stagedDiff).toBeNull();
  });
});

describe("UI statelessness", () => {
  it("replaying the same records into a fresh view model yields an equal view", () => {
    const records = [
      record("char_init", { structure: structure(), home: "d", pos: [1, 1] }, { day: 0 }),
      record("plan_final", { stage: "final", plan: plan(1) }),
      emotionRecord(4, null, { tick: 8 }),
      record("insight", { day: 1, reflection: "quiet day" }, { tick: 67 }),
    ];
    for (const rec of records) applyRecord(vm, rec);
    const reopened = emptyViewModel();
    for (const rec of records) applyRecord(reopened, rec);
    expect(reopened).toEqual(vm);
  });
});
