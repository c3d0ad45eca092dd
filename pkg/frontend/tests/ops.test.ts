import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { applyEnvEdit, setPaused, submitChat } from "../src/ops.js";
import { emptyViewModel } from "../src/viewmodel.js";
import type { ViewModel } from "../src/viewmodel.js";
import { jsonResponse } from "./fixtures.js";

const HEADER = "building,place,x,y,capacity,affordances,description,open,close";

let vm: ViewModel;

beforeEach(() => {
  vm = emptyViewModel();
});

function clientWith(fetchFn: (url: string, init?: RequestInit) => Promise<Response>) {
  return new ApiClient("http://sim", fetchFn);
}

describe("submitChat", () => {
  it("appends the user line and the reply for an idle agent", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse(200, { agent: "ana", text: "hi", reply: "hello!", day: 1, tick: 9 }),
    );
    const { ok } = await submitChat(clientWith(fetchFn), vm, "ana", "hi");
    expect(ok).toBe(true);
    expect(fetchFn).toHaveBeenCalledWith(
      "http://sim/agents/ana/chat",
      expect.objectContaining({ method: "POST", body: JSON.stringify({ text: "hi" }) }),
    );
    expect(vm.chat.ana).toEqual([
      { role: "user", text: "hi", day: 1, tick: 9 },
      { role: "agent", text: "hello!", day: 1, tick: 9 },
    ]);
    expect(vm.notice).toBeNull();
  });

  it("surfaces busy as a non-blocking notice without touching the transcript", async () => {
    vm.chat.ana = [{ role: "user", text: "earlier", day: 1, tick: 1 }];
    const fetchFn = vi.fn(async () => jsonResponse(409, { detail: "ana is busy" }));
    const { ok } = await submitChat(clientWith(fetchFn), vm, "ana", "hi again");
    expect(ok).toBe(false);
    expect(vm.notice?.kind).toBe("busy");
    expect(vm.chat.ana).toHaveLength(1);
  });

  it("blocks empty text client-side without a request", async () => {
    const fetchFn = vi.fn<() => Promise<Response>>();
    const { ok } = await submitChat(clientWith(fetchFn), vm, "ana", "   ");
    expect(ok).toBe(false);
    expect(vm.notice?.kind).toBe("validation");
    expect(fetchFn).not.toHaveBeenCalled();
  });

  it("maps 404 to an unknown-agent notice", async () => {
    const fetchFn = vi.fn(async () => jsonResponse(404, { detail: "unknown agent" }));
    const { ok } = await submitChat(clientWith(fetchFn), vm, "ghost", "hi");
    expect(ok).toBe(false);
    expect(vm.notice?.kind).toBe("error");
  });
});

describe("applyEnvEdit", () => {
  const goodCsv = `${HEADER}\ncenter,cafe,5,5,3,Meal,a cafe,08:00,20:00`;

  it("PUTs a valid edit and records the staged diff", async () => {
    const diff = { added: ["cafe"], removed: [], changed: [], effective_day: 2 };
    const fetchFn = vi.fn(async () => jsonResponse(200, diff));
    const { ok } = await applyEnvEdit(clientWith(fetchFn), vm, goodCsv);
    expect(ok).toBe(true);
    expect(fetchFn).toHaveBeenCalledWith(
      "http://sim/environment",
      expect.objectContaining({ method: "PUT", body: goodCsv }),
    );
    expect(vm.env.stagedDiff).toEqual(diff);
    expect(vm.env.notice).toBe("staged; takes effect on day 2");
    expect(vm.env.errors).toEqual([]);
  });

  it("shows local row errors inline without a round-trip", async () => {
    const fetchFn = vi.fn<() => Promise<Response>>();
    const bad = `${HEADER}\ncenter,cafe,5,5,0,Meal,a cafe,08:00,20:00`;
    const { ok } = await applyEnvEdit(clientWith(fetchFn), vm, bad);
    expect(ok).toBe(false);
    expect(vm.env.errors).toEqual([{ row: 2, message: "capacity < 1" }]);
    expect(fetchFn).not.toHaveBeenCalled();
  });

  it("renders server 422 rejections at the offending row", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse(422, { detail: { row: 3, error: "row 3: capacity < 1" } }),
    );
    const { ok } = await applyEnvEdit(clientWith(fetchFn), vm, goodCsv);
    expect(ok).toBe(false);
    expect(vm.env.errors[0]?.row).toBe(3);
  });

  it("reports 'no changes' without a request when the buffer is unchanged", async () => {
    const diff = { added: [], removed: [], changed: [], effective_day: 2 };
    let calls = 0;
    const fetchFn = vi.fn(async () => {
      calls += 1;
      return jsonResponse(200, diff);
    });
    await applyEnvEdit(clientWith(fetchFn), vm, goodCsv);
    expect(calls).toBe(1);
    expect(vm.env.notice).toBe("no changes"); // empty diff from the server
    const { ok } = await applyEnvEdit(clientWith(fetchFn), vm, goodCsv);
    expect(ok).toBe(false);
    expect(calls).toBe(1); // resubmission of the same buffer short-circuits
    expect(vm.env.notice).toBe("no changes");
  });
});

describe("setPaused", () => {
  it("hits pause/resume and mirrors the server's answer", async () => {
    const fetchFn = vi.fn(async (url: string) =>
      jsonResponse(200, { paused: url.endsWith("/run/pause") }),
    );
    await setPaused(clientWith(fetchFn), vm, true);
    expect(vm.paused).toBe(true);
    await setPaused(clientWith(fetchFn), vm, false);
    expect(vm.paused).toBe(false);
  });
});
