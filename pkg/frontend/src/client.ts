/**
 * Transport layer: typed HTTP calls plus the websocket event stream.
 *
 * Both transports are injected (a fetch-like function, a socket factory and
 * a timer) so the whole layer runs under tests with fakes. Defaults wire up
 * the real browser APIs.
 */

import type { SessionStore } from "./store.js";
import type {
  Command,
  CommandResponse,
  CreateSessionResponse,
  ModelSummary,
  StateEvent,
} from "./wire.js";

export class ServiceError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export interface FetchResponse {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponse>;

async function request<T>(fetcher: FetchLike, url: string, init?: Parameters<FetchLike>[1]): Promise<T> {
  const response = await fetcher(url, init);
  const body = (await response.json()) as T & {
    error?: { code: string; message: string };
  };
  if (response.status >= 400) {
    const err = body?.error;
    throw new ServiceError(
      err?.code ?? "unknown",
      err?.message ?? `request failed with status ${response.status}`,
      response.status,
    );
  }
  return body;
}

export class HttpClient {
  constructor(
    private readonly base = "",
    private readonly fetcher: FetchLike = (url, init) => fetch(url, init),
  ) {}

  listModels(): Promise<ModelSummary[]> {
    return request(this.fetcher, `${this.base}/api/models`);
  }

  createSession(model: string): Promise<CreateSessionResponse> {
    return request(this.fetcher, `${this.base}/api/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model }),
    });
  }

  getState(sessionId: string): Promise<StateEvent> {
    return request(this.fetcher, `${this.base}/api/sessions/${sessionId}`);
  }

  send(sessionId: string, command: Command): Promise<CommandResponse> {
    return request(this.fetcher, `${this.base}/api/sessions/${sessionId}/commands`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(command),
    });
  }
}

export interface WireSocket {
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: { code: number }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => WireSocket;
export type Scheduler = (fn: () => void, delayMs: number) => unknown;

export type StreamStatus = "connecting" | "open" | "retrying" | "gone" | "closed";
export type StatusListener = (status: StreamStatus) => void;

/** Session no longer exists on the server; reconnecting would be pointless. */
export const CLOSE_UNKNOWN_SESSION = 4404;

const RETRY_BASE_MS = 500;
const RETRY_MAX_MS = 8000;

/**
 * Keeps one websocket subscribed to a session and feeds every event into
 * the store. On an unexpected close it reconnects with capped exponential
 * backoff; the server replays a full snapshot on connect and the store's
 * revision guard drops whatever the client already saw.
 */
export class StreamClient {
  private socket: WireSocket | null = null;
  private attempts = 0;
  private stopped = false;
  private statusValue: StreamStatus = "closed";
  private statusListeners = new Set<StatusListener>();

  constructor(
    private readonly sessionId: string,
    private readonly store: SessionStore,
    private readonly makeSocket: SocketFactory,
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly base = "",
  ) {}

  get status(): StreamStatus {
    return this.statusValue;
  }

  onStatus(listener: StatusListener): () => void {
    this.statusListeners.add(listener);
    return () => {
      this.statusListeners.delete(listener);
    };
  }

  private setStatus(status: StreamStatus): void {
    this.statusValue = status;
    for (const listener of this.statusListeners) {
      listener(status);
    }
  }

  connect(): void {
    if (this.stopped) {
      return;
    }
    this.setStatus(this.attempts === 0 ? "connecting" : "retrying");
    const socket = this.makeSocket(`${this.base}/api/sessions/${this.sessionId}/stream`);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.setStatus("open");
    };
    socket.onmessage = (ev) => {
      if (typeof ev.data !== "string") {
        return;
      }
      let event: StateEvent;
      try {
        event = JSON.parse(ev.data) as StateEvent;
      } catch {
        return;
      }
      this.store.apply(event);
    };
    socket.onclose = (ev) => {
      this.socket = null;
      if (this.stopped) {
        return;
      }
      if (ev.code === CLOSE_UNKNOWN_SESSION) {
        this.stopped = true;
        this.setStatus("gone");
        return;
      }
      this.attempts += 1;
      this.setStatus("retrying");
      const delay = Math.min(RETRY_BASE_MS * 2 ** (this.attempts - 1), RETRY_MAX_MS);
      this.schedule(() => this.connect(), delay);
    };
    socket.onerror = () => {
      /* onclose carries the retry; nothing to do here */
    };
  }

  close(): void {
    this.stopped = true;
    this.setStatus("closed");
    this.socket?.close();
    this.socket = null;
  }
}
