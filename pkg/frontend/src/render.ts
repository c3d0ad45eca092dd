/** Pure view-model -> HTML string renderers. Keeping these free of DOM
 * calls lets the test suite assert on rendered output under node.
 */
import type { EmotionPoint, ViewModel } from "./viewmodel.js";

const EMOTION_LABELS: Record<number, string> = {
  1: "Despairing",
  2: "Distressed",
  3: "Anxious",
  4: "Calm",
  5: "Content",
  6: "Cheerful",
  7: "Excited",
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function minutesToClock(minutes: number): string {
  const hh = Math.floor(minutes / 60);
  const mm = minutes % 60;
  return `${String(hh).padStart(2, "0")}:${String(mm).padStart(2, "0")}`;
}

/** Downsampled character grid with place dots and agent markers. */
export function renderMap(vm: ViewModel, cols = 32, rows = 16): string {
  const cells: string[][] = Array.from({ length: rows }, () =>
    Array.from({ length: cols }, () => "·"),
  );
  const sx = (x: number) => Math.min(cols - 1, Math.floor((x / vm.grid.width) * cols));
  const sy = (y: number) => Math.min(rows - 1, Math.floor((y / vm.grid.height) * rows));
  for (const place of vm.places) {
    cells[sy(place.y)]![sx(place.x)] = "□";
  }
  for (const agent of Object.values(vm.agents)) {
    if (agent.position === null) continue;
    const [x, y] = agent.position;
    cells[sy(y)]![sx(x)] = (agent.name[0] ?? "?").toUpperCase();
  }
  const legend = Object.values(vm.agents)
    .map((a) => `${(a.name[0] ?? "?").toUpperCase()}=${escapeHtml(a.name)}`)
    .join(" ");
  return (
    `<pre class="map" data-day="${vm.day}" data-tick="${vm.tick}">` +
    cells.map((row) => row.join("")).join("\n") +
    `</pre><div class="legend">${legend}</div>`
  );
}

export function renderStatus(vm: ViewModel): string {
  const run = vm.paused ? "paused" : "running";
  const stale =
    vm.connection === "stale"
      ? `<div class="banner stale">connection lost — retrying…</div>`
      : "";
  return (
    `<div class="status">day ${vm.day} · ${escapeHtml(vm.clock)} · ${run}</div>` + stale
  );
}

export function renderEmotionTrace(trace: EmotionPoint[]): string {
  if (trace.length === 0) return `<div class="trace empty">no emotion updates yet</div>`;
  const points = trace
    .map((p) => {
      const label = EMOTION_LABELS[p.category] ?? String(p.category);
      const marker = p.replan ? ` <span class="replan">⟲ replan</span>` : "";
      return (
        `<li data-tick="${p.tick}" data-category="${p.category}">` +
        `${p.category} ${escapeHtml(label)}${marker}</li>`
      );
    })
    .join("");
  return `<ol class="trace">${points}</ol>`;
}

export function renderInspector(vm: ViewModel): string {
  const id = vm.selectedAgent;
  const agent = id === null ? undefined : vm.agents[id];
  if (!agent) return `<div class="inspector empty">select an agent</div>`;
  const parts: string[] = [`<h2>${escapeHtml(agent.name)}</h2>`];
  if (agent.structure) {
    const s = agent.structure;
    parts.push(
      `<dl class="structure" data-revision="${s.revision}">` +
        `<dt>profession</dt><dd>${escapeHtml(s.basic_info.profession)}</dd>` +
        `<dt>current state</dt><dd>${escapeHtml(s.current_state)}</dd>` +
        `<dt>traits</dt><dd>${escapeHtml(s.traits)}</dd>` +
        `<dt>conflict</dt><dd>${escapeHtml(s.conflict)}</dd>` +
        `</dl>`,
    );
  }
  const plan = agent.plan ?? agent.planDraft;
  if (plan) {
    const entries = plan.entries
      .map(
        (e) =>
          `<li class="entry ${escapeHtml(e.status)}">` +
          `${minutesToClock(e.start)}–${minutesToClock(e.end)} ` +
          `[${escapeHtml(e.goal)}] ${escapeHtml(e.description)} @ ${escapeHtml(e.place)}` +
          (e.partner ? ` with ${escapeHtml(e.partner)}` : "") +
          `</li>`,
      )
      .join("");
    parts.push(`<ol class="timeline" data-day="${plan.day}">${entries}</ol>`);
  }
  parts.push(renderEmotionTrace(agent.emotionTrace));
  if (agent.memories.length > 0) {
    parts.push(
      `<ul class="memories">` +
        agent.memories
          .map(
            (m) =>
              `<li class="${m.blurred ? "blurred" : ""}">day ${m.day}: ${escapeHtml(m.summary)}</li>`,
          )
          .join("") +
        `</ul>`,
    );
  }
  if (agent.insights.length > 0) {
    parts.push(
      `<ul class="insights">` +
        agent.insights
          .map((i) => `<li>day ${i.day}: ${escapeHtml(i.reflection)}</li>`)
          .join("") +
        `</ul>`,
    );
  }
  if (agent.growth.length > 0) {
    parts.push(
      `<ul class="growth">` +
        agent.growth
          .map(
            (g) =>
              `<li data-day="${g.day}">rev ${g.delta.old_revision} → ${g.delta.new_revision}: ` +
              `${escapeHtml(g.delta.state_diff)}</li>`,
          )
          .join("") +
        `</ul>`,
    );
  }
  return `<div class="inspector">${parts.join("")}</div>`;
}

export function renderChat(vm: ViewModel): string {
  const id = vm.selectedAgent;
  const transcript = id === null ? [] : (vm.chat[id] ?? []);
  const messages = transcript
    .map(
      (m) =>
        `<li class="msg ${m.role}"><span class="who">${m.role}</span> ${escapeHtml(m.text)}</li>`,
    )
    .join("");
  const notice = vm.notice
    ? `<div class="notice ${vm.notice.kind}">${escapeHtml(vm.notice.message)}</div>`
    : "";
  return `<ul class="chat">${messages}</ul>${notice}`;
}

export function renderEnvEditor(vm: ViewModel): string {
  const errors = vm.env.errors
    .map(
      (e) =>
        `<li class="row-error" data-row="${e.row}">row ${e.row}: ${escapeHtml(e.message)}</li>`,
    )
    .join("");
  const diff = vm.env.stagedDiff
    ? `<div class="staged-diff">` +
      `added: ${vm.env.stagedDiff.added.map(escapeHtml).join(", ") || "—"}; ` +
      `removed: ${vm.env.stagedDiff.removed.map(escapeHtml).join(", ") || "—"}; ` +
      `changed: ${vm.env.stagedDiff.changed.map(escapeHtml).join(", ") || "—"} ` +
      `(effective day ${vm.env.stagedDiff.effective_day})</div>`
    : "";
  const notice = vm.env.notice
    ? `<div class="env-notice">${escapeHtml(vm.env.notice)}</div>`
    : "";
  return `<ul class="csv-errors">${errors}</ul>${diff}${notice}`;
}

export function renderApp(vm: ViewModel): string {
  return (
    renderStatus(vm) +
    renderMap(vm) +
    renderInspector(vm) +
    renderChat(vm) +
    renderEnvEditor(vm)
  );
}
