/**
 * Typed client for the idiolect session service.
 *
 * Every engine interaction goes through these documented endpoints; the
 * console holds no other channel to mutate engine state.
 */

export interface Alternative {
  text: string;
  confidence: number;
}

export interface EventRecord {
  seq: number;
  kind: string;
  payload: Record<string, any>;
}

export interface PromptOption {
  label: string;
  display: string;
}

export interface Prompt {
  prompt_id: string;
  text: string;
  source?: string;
  options: PromptOption[];
}

export interface Outcome {
  kind: string;
  action?: string;
  bindings?: Record<string, unknown>;
  outcome?: string;
  detail?: string;
  repair_edits?: number;
  recognizer?: string;
  prompt?: Prompt;
}

export interface MessageResponse {
  events?: EventRecord[];
  outcome?: Outcome;
  // error responses: {type: "error", code: ...}
  type?: string;
  code?: string;
  message?: string;
}

export interface DocEntry {
  id: string;
  description: string;
  phrases: string[];
}

export interface SessionState {
  session_id: string;
  listening: boolean;
  history_length: number;
  pending_prompt: Prompt | null;
  last_seq: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message?: string) {
    super(message ?? code);
  }
}

type FetchLike = typeof fetch;

export class SessionApi {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<any> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    let body: any = text;
    try {
      body = text ? JSON.parse(text) : {};
    } catch {
      /* non-JSON bodies (the eval CSV) pass through as text */
    }
    if (!response.ok) {
      const code = typeof body === "object" && body?.code ? body.code : `http_${response.status}`;
      throw new ApiError(response.status, code, body?.message);
    }
    return body;
  }

  async createSession(): Promise<string> {
    const body = await this.request("/sessions", { method: "POST" });
    return body.session_id as string;
  }

  async state(sid: string): Promise<SessionState> {
    return this.request(`/sessions/${sid}`);
  }

  async send(sid: string, message: Record<string, unknown>): Promise<MessageResponse> {
    return this.request(`/sessions/${sid}/messages`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(message),
    });
  }

  async events(sid: string, after: number): Promise<EventRecord[]> {
    const body = await this.request(`/sessions/${sid}/events?after=${after}`);
    return (body.events ?? []) as EventRecord[];
  }

  async docs(): Promise<DocEntry[]> {
    return this.request("/actions/docs");
  }

  /** Raw CSV text of the last evaluation report; throws ApiError(404) when absent. */
  async evalReport(): Promise<string> {
    return this.request("/eval/report");
  }

  submitUtterance(sid: string, text: string, alternatives?: Alternative[]): Promise<MessageResponse> {
    const alts = alternatives ?? [{ text, confidence: 1.0 }];
    return this.send(sid, { type: "utterance", alternatives: alts });
  }

  resolvePrompt(sid: string, promptId: string, choice: string): Promise<MessageResponse> {
    return this.send(sid, { type: "resolve", prompt_id: promptId, choice });
  }

  bindPhrase(sid: string, phrase: string, action: string): Promise<MessageResponse> {
    return this.send(sid, { type: "bind", phrase, action });
  }
}
