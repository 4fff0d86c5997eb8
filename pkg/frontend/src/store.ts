/**
 * Session view state. Events may arrive twice (message responses overlap the
 * polling loop), so the store deduplicates by seq and keeps the feed strictly
 * ordered. All derived panels (prompt card, listening light, history) follow
 * from the event stream alone.
 */

import type { EventRecord, Prompt } from "./api.js";

export type ConnectionState = "connecting" | "connected" | "reconnecting";

export interface HistoryRow {
  seq: number;
  action: string;
  status: string;
  detail: string;
  recognizer: string;
  bindings: Record<string, unknown>;
}

export interface SessionView {
  connection: ConnectionState;
  sessionId: string | null;
  lastSeq: number;
  feed: EventRecord[];
  pendingPrompt: Prompt | null;
  listening: boolean;
  history: HistoryRow[];
}

export type Listener = (view: SessionView) => void;

const PAUSE_ACTION = "Idiolect.Pause";
const RESUME_ACTION = "Idiolect.Resume";

export class SessionStore {
  readonly view: SessionView = {
    connection: "connecting",
    sessionId: null,
    lastSeq: 0,
    feed: [],
    pendingPrompt: null,
    listening: true,
    history: [],
  };

  private listeners: Listener[] = [];
  private seen = new Set<number>();

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.view);
  }

  setConnection(state: ConnectionState): void {
    if (this.view.connection !== state) {
      this.view.connection = state;
      this.notify();
    }
  }

  setSessionId(sid: string): void {
    this.view.sessionId = sid;
    this.notify();
  }

  /** Fold a batch of events into the view; ignores duplicates, keeps order. */
  applyEvents(events: EventRecord[]): void {
    let changed = false;
    for (const event of events) {
      if (this.seen.has(event.seq)) continue;
      this.seen.add(event.seq);
      this.insertOrdered(event);
      this.reduce(event);
      changed = true;
    }
    if (changed) this.notify();
  }

  private insertOrdered(event: EventRecord): void {
    const feed = this.view.feed;
    if (feed.length === 0 || feed[feed.length - 1].seq < event.seq) {
      feed.push(event);
    } else {
      let i = feed.length;
      while (i > 0 && feed[i - 1].seq > event.seq) i--;
      feed.splice(i, 0, event);
    }
    if (event.seq > this.view.lastSeq) this.view.lastSeq = event.seq;
  }

  private reduce(event: EventRecord): void {
    const view = this.view;
    switch (event.kind) {
      case "UtteranceReceived":
        view.pendingPrompt = null; // a new utterance supersedes any open prompt
        break;
      case "RepairProposed":
        view.pendingPrompt = {
          prompt_id: String(event.payload.prompt_id),
          text: String(event.payload.text ?? ""),
          source: event.payload.source as string | undefined,
          options: (event.payload.options ?? []) as Prompt["options"],
        };
        break;
      case "RepairResolved":
        view.pendingPrompt = null;
        break;
      case "ActionExecuted": {
        const payload = event.payload;
        view.history.push({
          seq: Number(payload.seq ?? 0),
          action: String(payload.action ?? ""),
          status: String(payload.outcome?.status ?? ""),
          detail: String(payload.outcome?.detail ?? ""),
          recognizer: String(payload.recognizer ?? ""),
          bindings: (payload.bindings ?? {}) as Record<string, unknown>,
        });
        if (payload.action === PAUSE_ACTION) view.listening = false;
        if (payload.action === RESUME_ACTION) view.listening = true;
        break;
      }
      default:
        break;
    }
  }
}
