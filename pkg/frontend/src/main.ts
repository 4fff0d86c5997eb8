import { ApiError, SessionApi } from "./api.js";
import { SessionController } from "./controller.js";
import { SessionStore } from "./store.js";
import { grabElements, populateActionList, render, renderEvalDashboard, wireForms } from "./ui.js";

async function boot(): Promise<void> {
  const api = new SessionApi("");
  const store = new SessionStore();
  const controller = new SessionController(api, store);
  const ui = grabElements(document);

  store.subscribe((view) => render(view, ui, controller));
  wireForms(ui, controller);

  ui.evalLoad.addEventListener("click", async () => {
    try {
      renderEvalDashboard(ui, await api.evalReport());
    } catch (error) {
      ui.evalNotice.textContent =
        error instanceof ApiError && error.status === 404
          ? "no eval report yet — run `idiolect --eval default`"
          : `failed to load report: ${error}`;
    }
  });

  try {
    populateActionList(ui, await api.docs());
  } catch {
    /* docs are a convenience; the console works without them */
  }

  await controller.start();
}

window.addEventListener("DOMContentLoaded", () => void boot());
