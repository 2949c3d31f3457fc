/** Thin fetch client for the session service.  All session capability
 * lives server-side; this module only shuttles JSON. */

import type {
  ApiErrorBody,
  InterventionBody,
  KeyRecord,
  SessionEvent,
  SessionSnapshot,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let body: ApiErrorBody = { code: "unknown", message: resp.statusText };
    try {
      body = (await resp.json()) as ApiErrorBody;
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(resp.status, body.code, body.message);
  }
  return (await resp.json()) as T;
}

export interface CreateSessionRequest {
  script: string;
  backend: "scripted" | "replay" | "live";
  fixtures?: string;
  check_hashes?: boolean;
  endpoint?: string;
  idempotency_token?: string;
  case?: string;
  options?: Record<string, unknown>;
  params?: Record<string, unknown>;
}

export interface EventsPage {
  events: SessionEvent[];
  next: number;
  status: string;
}

export class ApiClient {
  constructor(private readonly base: string) {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  async createSession(body: CreateSessionRequest): Promise<SessionSnapshot> {
    const resp = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return unwrap<SessionSnapshot>(resp);
  }

  async getSession(id: string): Promise<SessionSnapshot> {
    return unwrap(await fetch(this.url(`/sessions/${id}`)));
  }

  /** JSON polling fallback for environments without EventSource. */
  async getEvents(id: string, after = -1): Promise<EventsPage> {
    return unwrap(
      await fetch(this.url(`/sessions/${id}/events?after=${after}`)),
    );
  }

  async getKeys(id: string): Promise<KeyRecord[]> {
    const page = await unwrap<{ keys: KeyRecord[] }>(
      await fetch(this.url(`/sessions/${id}/keys`)),
    );
    return page.keys;
  }

  async getReport(id: string, format: "md" | "json" = "json"): Promise<string> {
    const resp = await fetch(this.url(`/sessions/${id}/report?format=${format}`));
    if (!resp.ok) {
      const body = (await resp.json()) as ApiErrorBody;
      throw new ApiError(resp.status, body.code, body.message);
    }
    return resp.text();
  }

  reportUrl(id: string, format: "md" | "json"): string {
    return this.url(`/sessions/${id}/report?format=${format}`);
  }

  async intervene(
    id: string,
    body: InterventionBody,
  ): Promise<{ status: string; key_versions: Record<string, number> }> {
    const resp = await fetch(this.url(`/sessions/${id}/intervene`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return unwrap(resp);
  }

  async pause(id: string): Promise<{ status: string }> {
    return unwrap(
      await fetch(this.url(`/sessions/${id}/pause`), { method: "POST" }),
    );
  }

  /** Drain the event stream via polling until the session settles.
   * Calls onEvent for every event exactly once, in order. */
  async followEvents(
    id: string,
    onEvent: (event: SessionEvent) => void,
    opts: { intervalMs?: number; until?: (status: string) => boolean } = {},
  ): Promise<string> {
    const interval = opts.intervalMs ?? 50;
    const done = opts.until ?? ((s) => s === "complete" || s === "failed");
    let after = -1;
    for (;;) {
      const page = await this.getEvents(id, after);
      for (const event of page.events) {
        onEvent(event);
        after = event.index;
      }
      if (done(page.status)) return page.status;
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }
}
