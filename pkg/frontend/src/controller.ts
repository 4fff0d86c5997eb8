/**
 * Glue between the API and the store: owns the session, the polling loop
 * (events after the last seen seq, so reconnection never drops or repeats),
 * and the user actions.
 */

import { SessionApi, type MessageResponse } from "./api.js";
import { SessionStore } from "./store.js";

export interface ControllerOptions {
  pollIntervalMs?: number;
  maxBackoffMs?: number;
}

export class SessionController {
  private sid: string | null = null;
  private running = false;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private backoffMs: number;
  private readonly pollIntervalMs: number;
  private readonly maxBackoffMs: number;

  constructor(
    readonly api: SessionApi,
    readonly store: SessionStore,
    options: ControllerOptions = {},
  ) {
    this.pollIntervalMs = options.pollIntervalMs ?? 120;
    this.maxBackoffMs = options.maxBackoffMs ?? 5000;
    this.backoffMs = this.pollIntervalMs;
  }

  get sessionId(): string | null {
    return this.sid;
  }

  async start(): Promise<void> {
    this.running = true;
    this.sid = await this.api.createSession();
    this.store.setSessionId(this.sid);
    this.store.setConnection("connected");
    this.schedule(this.pollIntervalMs);
  }

  stop(): void {
    this.running = false;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
  }

  private schedule(delay: number): void {
    if (!this.running) return;
    this.timer = setTimeout(() => void this.pollOnce(), delay);
  }

  async pollOnce(): Promise<void> {
    if (!this.running || this.sid === null) return;
    try {
      const events = await this.api.events(this.sid, this.store.view.lastSeq);
      this.store.applyEvents(events);
      this.store.setConnection("connected");
      this.backoffMs = this.pollIntervalMs;
      this.schedule(this.pollIntervalMs);
    } catch {
      this.store.setConnection("reconnecting");
      this.backoffMs = Math.min(this.backoffMs * 2, this.maxBackoffMs);
      this.schedule(this.backoffMs);
    }
  }

  private absorb(response: MessageResponse): MessageResponse {
    if (response.events) this.store.applyEvents(response.events);
    return response;
  }

  async submitUtterance(text: string): Promise<MessageResponse> {
    if (!this.sid) throw new Error("no session");
    return this.absorb(await this.api.submitUtterance(this.sid, text));
  }

  async resolvePrompt(choice: string): Promise<MessageResponse> {
    if (!this.sid) throw new Error("no session");
    const prompt = this.store.view.pendingPrompt;
    if (!prompt) throw new Error("no pending prompt");
    return this.absorb(await this.api.resolvePrompt(this.sid, prompt.prompt_id, choice));
  }

  async submitBinding(phrase: string, action: string): Promise<MessageResponse> {
    if (!this.sid) throw new Error("no session");
    return this.absorb(await this.api.bindPhrase(this.sid, phrase, action));
  }
}
