import { describe, expect, it } from "vitest";

import type { EventRecord } from "../src/api.js";
import { SessionStore } from "../src/store.js";

function event(seq: number, kind: string, payload: Record<string, any> = {}): EventRecord {
  return { seq, kind, payload };
}

describe("SessionStore", () => {
  it("keeps the feed strictly seq-ordered even with shuffled batches", () => {
    const store = new SessionStore();
    store.applyEvents([event(3, "Transcribed", { text: "c" })]);
    store.applyEvents([event(1, "UtteranceReceived", { id: 1 }), event(2, "Transcribed", { text: "b" })]);
    expect(store.view.feed.map((e) => e.seq)).toEqual([1, 2, 3]);
    expect(store.view.lastSeq).toBe(3);
  });

  it("drops duplicate seqs (poll overlap with message responses)", () => {
    const store = new SessionStore();
    const batch = [event(1, "UtteranceReceived", {}), event(2, "Transcribed", {})];
    store.applyEvents(batch);
    store.applyEvents(batch);
    expect(store.view.feed).toHaveLength(2);
  });

  it("renders every received event: 1000 events, zero drops", () => {
    const store = new SessionStore();
    const events = Array.from({ length: 1000 }, (_, i) => event(i + 1, "Transcribed", { text: `${i}` }));
    // deliver in shuffled chunks
    for (let i = 0; i < events.length; i += 7) {
      store.applyEvents(events.slice(i, i + 7).reverse());
    }
    expect(store.view.feed).toHaveLength(1000);
    expect(store.view.feed.map((e) => e.seq)).toEqual(events.map((e) => e.seq));
  });

  it("tracks the pending prompt lifecycle", () => {
    const store = new SessionStore();
    store.applyEvents([
      event(1, "RepairProposed", {
        prompt_id: "p1",
        text: "Did you mean ...?",
        options: [{ label: "a", display: "open file foo.java" }],
      }),
    ]);
    expect(store.view.pendingPrompt?.prompt_id).toBe("p1");
    store.applyEvents([event(2, "RepairResolved", { prompt_id: "p1", choice: "a" })]);
    expect(store.view.pendingPrompt).toBeNull();
  });

  it("a new utterance supersedes an open prompt (at most one pending)", () => {
    const store = new SessionStore();
    store.applyEvents([event(1, "RepairProposed", { prompt_id: "p1", text: "?", options: [] })]);
    store.applyEvents([event(2, "UtteranceReceived", { id: 2 })]);
    expect(store.view.pendingPrompt).toBeNull();
  });

  it("derives the listening indicator from executed control actions", () => {
    const store = new SessionStore();
    expect(store.view.listening).toBe(true);
    store.applyEvents([
      event(1, "ActionExecuted", { seq: 1, action: "Idiolect.Pause", outcome: { status: "ok", detail: "" } }),
    ]);
    expect(store.view.listening).toBe(false);
    store.applyEvents([
      event(2, "ActionExecuted", { seq: 2, action: "Idiolect.Resume", outcome: { status: "ok", detail: "" } }),
    ]);
    expect(store.view.listening).toBe(true);
  });

  it("collects history rows from ActionExecuted events", () => {
    const store = new SessionStore();
    store.applyEvents([
      event(1, "ActionExecuted", {
        seq: 1,
        action: "OpenFile",
        bindings: { f: "readme.md" },
        outcome: { status: "ok", detail: "open file" },
        recognizer: "default-pattern",
      }),
    ]);
    expect(store.view.history).toHaveLength(1);
    expect(store.view.history[0]).toMatchObject({
      action: "OpenFile",
      status: "ok",
      recognizer: "default-pattern",
      bindings: { f: "readme.md" },
    });
  });

  it("notifies subscribers once per applied batch", () => {
    const store = new SessionStore();
    let calls = 0;
    store.subscribe(() => {
      calls += 1;
    });
    store.applyEvents([event(1, "Transcribed", {}), event(2, "Transcribed", {})]);
    expect(calls).toBe(1);
    store.applyEvents([event(1, "Transcribed", {})]); // all duplicates: no notify
    expect(calls).toBe(1);
  });
});
