/**
 * DOM rendering. One render(view) pass redraws the dynamic panels; forms are
 * wired once at setup. Kept free of framework dependencies so the scripted
 * tests can drive it under jsdom.
 */

import type { DocEntry, EventRecord } from "./api.js";
import { CsvError, chartGroups, parseEvalCsv, renderBarChartSvg, type EvalRow } from "./chart.js";
import type { SessionController } from "./controller.js";
import type { SessionView } from "./store.js";

export interface UiElements {
  status: HTMLElement;
  listening: HTMLElement;
  feed: HTMLElement;
  promptCard: HTMLElement;
  history: HTMLElement;
  utteranceForm: HTMLFormElement;
  utteranceInput: HTMLInputElement;
  bindingForm: HTMLFormElement;
  bindingPhrase: HTMLInputElement;
  bindingAction: HTMLInputElement;
  bindingSubmit: HTMLButtonElement;
  actionList: HTMLElement; // <datalist>
  evalLoad: HTMLButtonElement;
  evalChart: HTMLElement;
  evalTable: HTMLElement;
  evalNotice: HTMLElement;
}

export function grabElements(root: Document): UiElements {
  const get = (id: string) => {
    const el = root.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el;
  };
  return {
    status: get("status"),
    listening: get("listening"),
    feed: get("feed"),
    promptCard: get("prompt-card"),
    history: get("history"),
    utteranceForm: get("utterance-form") as HTMLFormElement,
    utteranceInput: get("utterance-input") as HTMLInputElement,
    bindingForm: get("binding-form") as HTMLFormElement,
    bindingPhrase: get("binding-phrase") as HTMLInputElement,
    bindingAction: get("binding-action") as HTMLInputElement,
    bindingSubmit: get("binding-submit") as HTMLButtonElement,
    actionList: get("action-list"),
    evalLoad: get("eval-load") as HTMLButtonElement,
    evalChart: get("eval-chart"),
    evalTable: get("eval-table"),
    evalNotice: get("eval-notice"),
  };
}

function describeEvent(event: EventRecord): string {
  const p = event.payload;
  switch (event.kind) {
    case "UtteranceReceived":
      return `heard #${p.id}`;
    case "Transcribed":
      return `"${p.text}"`;
    case "IntentRecognized":
      return `${p.action} via ${p.recognizer}${p.repair_edits ? ` (repaired x${p.repair_edits})` : ""}`;
    case "ActionExecuted":
      return `${p.action} -> ${p.outcome?.status}: ${p.outcome?.detail}`;
    case "RepairProposed":
      return String(p.text ?? "did you mean ...?");
    case "RepairResolved":
      return `chose (${p.choice})${p.action ? ` -> ${p.action}` : ""}`;
    case "Unrecognized":
      return `not recognized: "${p.text}"`;
    case "BindingAdded":
      return `bound "${p.phrase}" -> ${p.action}`;
    default:
      return event.kind;
  }
}

export function render(view: SessionView, ui: UiElements, controller: SessionController): void {
  ui.status.textContent =
    view.connection === "connected"
      ? `connected${view.sessionId ? ` (${view.sessionId})` : ""}`
      : view.connection === "reconnecting"
        ? "connection lost — retrying…"
        : "connecting…";
  ui.status.className = `status ${view.connection}`;
  ui.listening.textContent = view.listening ? "● listening" : "○ paused";
  ui.listening.className = view.listening ? "listening on" : "listening off";

  // event feed (already seq-ordered by the store)
  ui.feed.textContent = "";
  for (const event of view.feed) {
    const row = ui.feed.ownerDocument.createElement("div");
    row.className = `event event-${event.kind}`;
    row.setAttribute("data-seq", String(event.seq));
    row.setAttribute("data-kind", event.kind);
    row.textContent = `${event.seq}. [${event.kind}] ${describeEvent(event)}`;
    ui.feed.appendChild(row);
  }

  // pending prompt
  ui.promptCard.textContent = "";
  if (view.pendingPrompt) {
    const doc = ui.promptCard.ownerDocument;
    const title = doc.createElement("p");
    title.textContent = view.pendingPrompt.text;
    ui.promptCard.appendChild(title);
    for (const option of view.pendingPrompt.options) {
      const button = doc.createElement("button");
      button.textContent = `(${option.label}) ${option.display}`;
      button.setAttribute("data-choice", option.label);
      button.addEventListener("click", () => void controller.resolvePrompt(option.label));
      ui.promptCard.appendChild(button);
    }
    ui.promptCard.className = "prompt open";
  } else {
    ui.promptCard.className = "prompt empty";
  }

  // history panel
  ui.history.textContent = "";
  for (const row of view.history) {
    const el = ui.history.ownerDocument.createElement("div");
    el.className = `history-row ${row.status}`;
    el.setAttribute("data-action", row.action);
    const args = Object.entries(row.bindings)
      .map(([k, v]) => `${k}=${v}`)
      .join(" ");
    el.textContent = `#${row.seq} ${row.action}${args ? ` {${args}}` : ""} — ${row.status}`;
    ui.history.appendChild(el);
  }
}

export function wireForms(ui: UiElements, controller: SessionController): void {
  ui.utteranceForm.addEventListener("submit", (e) => {
    e.preventDefault();
    const text = ui.utteranceInput.value.trim();
    if (!text) return;
    ui.utteranceInput.value = "";
    void controller.submitUtterance(text);
  });

  const validateBinding = () => {
    const valid =
      ui.bindingPhrase.value.trim().length > 0 && ui.bindingAction.value.trim().length > 0;
    ui.bindingSubmit.disabled = !valid;
  };
  validateBinding();
  ui.bindingPhrase.addEventListener("input", validateBinding);
  ui.bindingAction.addEventListener("input", validateBinding);
  ui.bindingForm.addEventListener("submit", (e) => {
    e.preventDefault();
    const phrase = ui.bindingPhrase.value.trim();
    const action = ui.bindingAction.value.trim();
    if (!phrase || !action) return;
    ui.bindingPhrase.value = "";
    validateBinding();
    void controller.submitBinding(phrase, action);
  });
}

export function populateActionList(ui: UiElements, docs: DocEntry[]): void {
  const doc = ui.actionList.ownerDocument;
  ui.actionList.textContent = "";
  for (const entry of docs) {
    const option = doc.createElement("option");
    option.setAttribute("value", entry.id);
    option.textContent = entry.description;
    ui.actionList.appendChild(option);
  }
}

export function renderEvalDashboard(ui: UiElements, csvText: string): EvalRow[] {
  let rows: EvalRow[];
  try {
    rows = parseEvalCsv(csvText);
  } catch (error) {
    if (error instanceof CsvError) {
      ui.evalNotice.textContent = `cannot parse report: ${error.message}`;
      ui.evalChart.textContent = "";
      ui.evalTable.textContent = "";
      return [];
    }
    throw error;
  }
  ui.evalNotice.textContent = rows.length === 0 ? "no data" : "";
  ui.evalChart.innerHTML = renderBarChartSvg(chartGroups(rows));

  const doc = ui.evalTable.ownerDocument;
  ui.evalTable.textContent = "";
  if (rows.length > 0) {
    const table = doc.createElement("table");
    const head = doc.createElement("tr");
    for (const col of ["condition", "n", "mean_wer", "intent_accuracy", "repair_recovery"]) {
      const th = doc.createElement("th");
      th.textContent = col;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = doc.createElement("tr");
      tr.setAttribute("data-condition", row.condition);
      const cells = [
        row.condition,
        String(row.n),
        row.mean_wer.toFixed(6),
        row.intent_accuracy.toFixed(6),
        row.repair_recovery.toFixed(6),
      ];
      for (const [i, value] of cells.entries()) {
        const td = doc.createElement("td");
        td.textContent = value;
        td.setAttribute("data-col", ["condition", "n", "mean_wer", "intent_accuracy", "repair_recovery"][i]);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    ui.evalTable.appendChild(table);
  }
  return rows;
}
