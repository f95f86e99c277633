/** Typed client for the patternsync HTTP session service.
 *
 * Mutations are queued so at most one is in flight per client; a failed or
 * dropped response leaves the tracked revision unchanged, so both windows
 * keep rendering the last consistent state.
 */

import type {
  EditOpRecord,
  OpResponse,
  ServiceError,
  SessionSummary,
  StatePayload,
  Vec2,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: ServiceError;

  constructor(status: number, detail: ServiceError) {
    super(`${detail.code}: ${detail.message}`);
    this.status = status;
    this.detail = detail;
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let detail: ServiceError;
  try {
    detail = (await res.json()) as ServiceError;
  } catch {
    detail = { code: `HTTP${res.status}`, entity: null, message: res.statusText };
  }
  return new ApiError(res.status, detail);
}

export class SessionClient {
  readonly baseUrl: string;
  sessionId: string | null = null;
  revision = 0;
  summary: SessionSummary | null = null;
  private mutationChain: Promise<unknown> = Promise.resolve();

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  async healthz(): Promise<boolean> {
    try {
      const res = await fetch(`${this.baseUrl}/healthz`);
      return res.ok;
    } catch {
      return false;
    }
  }

  /** Create a session; empty body uses the server's default document. */
  async createSession(documentBytes?: Uint8Array | string): Promise<SessionSummary> {
    const res = await fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: documentBytes as BodyInit | undefined,
    });
    if (res.status !== 201) throw await parseError(res);
    const body = (await res.json()) as {
      id: string;
      revision: number;
      summary: SessionSummary;
    };
    this.sessionId = body.id;
    this.revision = body.revision;
    this.summary = body.summary;
    return body.summary;
  }

  private id(): string {
    if (this.sessionId === null) throw new Error("no session created");
    return this.sessionId;
  }

  async getState(what: "garment" | "pattern" | "all" = "all"): Promise<StatePayload> {
    const res = await fetch(
      `${this.baseUrl}/sessions/${this.id()}/state?what=${what}`,
    );
    if (!res.ok) throw await parseError(res);
    const state = (await res.json()) as StatePayload;
    this.revision = state.revision;
    return state;
  }

  /** Queue a mutation: at most one request is in flight at a time. */
  private enqueue<T>(run: () => Promise<T>): Promise<T> {
    const next = this.mutationChain.then(run, run);
    this.mutationChain = next.catch(() => undefined);
    return next;
  }

  applyOp(op: EditOpRecord, mirror: boolean): Promise<OpResponse> {
    return this.enqueue(async () => {
      const res = await fetch(`${this.baseUrl}/sessions/${this.id()}/ops`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ op, mirror, revision: this.revision }),
      });
      if (!res.ok) throw await parseError(res);
      const body = (await res.json()) as OpResponse;
      this.revision = body.revision;
      return body;
    });
  }

  undo(): Promise<OpResponse> {
    return this.enqueue(async () => {
      const res = await fetch(`${this.baseUrl}/sessions/${this.id()}/undo`, {
        method: "POST",
      });
      if (!res.ok) throw await parseError(res);
      const body = (await res.json()) as OpResponse;
      this.revision = body.revision;
      return body;
    });
  }

  setLayout(panel: number, offset: Vec2): Promise<Record<string, Vec2>> {
    return this.enqueue(async () => {
      const res = await fetch(`${this.baseUrl}/sessions/${this.id()}/layout`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ panel, offset }),
      });
      if (!res.ok) throw await parseError(res);
      const body = (await res.json()) as { layout: Record<string, Vec2> };
      return body.layout;
    });
  }
}
