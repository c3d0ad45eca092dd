/** Browser entry point: bootstrap from the server, subscribe to the event
 * stream, re-render on every change, and wire the three input forms.
 */
import { ApiClient } from "./api.js";
import { applyEnvEdit, setPaused, submitChat } from "./ops.js";
import { renderApp } from "./render.js";
import { applyRecord, applySnapshot, emptyViewModel, selectAgent } from "./viewmodel.js";

export async function mount(root: HTMLElement, baseUrl = ""): Promise<void> {
  const client = new ApiClient(baseUrl);
  const vm = emptyViewModel();

  const redraw = () => {
    root.innerHTML = renderApp(vm);
    root.querySelectorAll<HTMLElement>(".map").forEach((el) => {
      el.addEventListener("click", () => {
        // Cycle the selected agent on map clicks.
        const ids = Object.keys(vm.agents);
        const at = vm.selectedAgent === null ? -1 : ids.indexOf(vm.selectedAgent);
        selectAgent(vm, ids[(at + 1) % ids.length] ?? null);
        redraw();
      });
    });
  };

  applySnapshot(vm, await client.state());
  for (const rec of await client.logs()) applyRecord(vm, rec);
  const first = Object.keys(vm.agents)[0];
  if (first !== undefined) selectAgent(vm, first);
  redraw();

  client.streamEvents({
    onRecord: (rec) => {
      if (applyRecord(vm, rec)) redraw();
    },
    onStatus: (status) => {
      vm.connection = status;
      redraw();
    },
  });

  const controls = document.createElement("div");
  controls.className = "controls";
  controls.innerHTML = `
    <button data-act="step">step</button>
    <button data-act="day">run day</button>
    <button data-act="pause">pause</button>
    <button data-act="resume">resume</button>
    <form class="chat-form"><input name="text" placeholder="say something"/><button>send</button></form>
    <form class="env-form"><textarea name="csv" rows="8"></textarea><button>apply csv</button></form>`;
  root.before(controls);

  controls.querySelectorAll<HTMLButtonElement>("button[data-act]").forEach((btn) => {
    btn.addEventListener("click", async () => {
      const act = btn.dataset.act;
      if (act === "step") await client.step();
      else if (act === "day") await client.runDay();
      else if (act === "pause") await setPaused(client, vm, true);
      else if (act === "resume") await setPaused(client, vm, false);
      redraw();
    });
  });

  controls.querySelector<HTMLFormElement>(".chat-form")?.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    if (vm.selectedAgent === null) return;
    const input = controls.querySelector<HTMLInputElement>(".chat-form input")!;
    await submitChat(client, vm, vm.selectedAgent, input.value);
    input.value = "";
    redraw();
  });

  controls.querySelector<HTMLFormElement>(".env-form")?.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const area = controls.querySelector<HTMLTextAreaElement>(".env-form textarea")!;
    await applyEnvEdit(client, vm, area.value);
    redraw();
  });
}

declare global {
  interface Window {
    evosimMount?: typeof mount;
  }
}

if (typeof window !== "undefined") {
  window.evosimMount = mount;
}
