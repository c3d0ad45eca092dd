/** User-initiated operations. These are the only mutation paths in the UI:
 * chat POST, environment PUT, and run control POSTs. Each returns the
 * updated view model plus any notice to surface; failures never corrupt
 * the view model.
 */
import { ApiClient, ApiError } from "./api.js";
import { validateWorldCsv } from "./csv.js";
import type { ViewModel } from "./viewmodel.js";

export interface OpResult {
  vm: ViewModel;
  ok: boolean;
}

export async function submitChat(
  client: ApiClient,
  vm: ViewModel,
  agentId: string,
  text: string,
): Promise<OpResult> {
  if (text.trim() === "") {
    vm.notice = { kind: "validation", message: "chat text must not be empty" };
    return { vm, ok: false };
  }
  try {
    const reply = await client.chat(agentId, text);
    const transcript = (vm.chat[agentId] ??= []);
    transcript.push(
      { role: "user", text, day: reply.day, tick: reply.tick },
      { role: "agent", text: reply.reply, day: reply.day, tick: reply.tick },
    );
    vm.notice = null;
    return { vm, ok: true };
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      vm.notice = {
        kind: "busy",
        message: `${agentId} is busy right now — try again shortly`,
      };
      return { vm, ok: false };
    }
    if (err instanceof ApiError && err.status === 404) {
      vm.notice = { kind: "error", message: `unknown agent ${agentId}` };
      return { vm, ok: false };
    }
    throw err;
  }
}

export async function applyEnvEdit(
  client: ApiClient,
  vm: ViewModel,
  csvText: string,
): Promise<OpResult> {
  vm.env.buffer = csvText;
  const baseline = vm.env.lastSubmitted;
  if (baseline !== null && baseline === csvText) {
    vm.env.notice = "no changes";
    vm.env.errors = [];
    return { vm, ok: false };
  }
  const errors = validateWorldCsv(csvText, vm.grid);
  if (errors.length > 0) {
    vm.env.errors = errors;
    vm.env.notice = null;
    return { vm, ok: false };
  }
  try {
    const diff = await client.putEnvironment(csvText);
    vm.env.errors = [];
    vm.env.stagedDiff = diff;
    vm.env.lastSubmitted = csvText;
    if (
      diff.added.length === 0 &&
      diff.removed.length === 0 &&
      diff.changed.length === 0
    ) {
      vm.env.notice = "no changes";
    } else {
      vm.env.notice = `staged; takes effect on day ${diff.effective_day}`;
    }
    return { vm, ok: true };
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      const detail = err.detail as { row?: number; error?: string };
      vm.env.errors = [
        {
          row: detail.row ?? 1,
          message: detail.error ?? String(err.detail),
        },
      ];
      vm.env.notice = null;
      return { vm, ok: false };
    }
    throw err;
  }
}

export async function setPaused(
  client: ApiClient,
  vm: ViewModel,
  paused: boolean,
): Promise<OpResult> {
  const result = paused ? await client.pause() : await client.resume();
  vm.paused = result.paused;
  return { vm, ok: true };
}
