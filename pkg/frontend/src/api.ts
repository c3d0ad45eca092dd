/** Thin typed client over the simulation server's HTTP/SSE API.
 *
 * `fetch` is injectable so tests can run against canned responses. The event
 * stream reconnects with exponential backoff; duplicate records delivered
 * after a reconnect are harmless because the view-model reducer drops any
 * record whose sequence number it has already applied.
 */
import { SseParser } from "./sse.js";
import type {
  AgentSnapshot,
  ChatReply,
  EnvDiff,
  LogRecord,
  StateSnapshot,
} from "./types.js";
import { isLogRecord } from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`server returned ${status}: ${JSON.stringify(detail)}`);
    this.name = "ApiError";
  }
}

export type StreamStatus = "connected" | "stale" | "closed";

export interface StreamOptions {
  onRecord: (record: LogRecord) => void;
  onStatus?: (status: StreamStatus) => void;
  /** Initial reconnect delay in ms; doubles per failure up to 16x. */
  backoffMs?: number;
  /** Give up after this many consecutive failed connection attempts. */
  maxRetries?: number;
}

export interface StreamHandle {
  close(): void;
  /** Resolves when the stream loop has fully stopped. */
  done: Promise<void>;
}

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const body = await parseBody(resp);
    if (!resp.ok) {
      throw new ApiError(resp.status, extractDetail(body));
    }
    return body as T;
  }

  state(): Promise<StateSnapshot> {
    return this.request<StateSnapshot>("/state");
  }

  agent(agentId: string): Promise<AgentSnapshot> {
    return this.request<AgentSnapshot>(`/agents/${encodeURIComponent(agentId)}`);
  }

  logs(day?: number): Promise<LogRecord[]> {
    const query = day === undefined ? "" : `?day=${day}`;
    return this.request<LogRecord[]>(`/logs${query}`);
  }

  step(): Promise<{ day: number; tick: number }> {
    return this.request("/run/step", { method: "POST" });
  }

  runDay(): Promise<{ day: number; tick: number }> {
    return this.request("/run/day", { method: "POST" });
  }

  pause(): Promise<{ paused: boolean }> {
    return this.request("/run/pause", { method: "POST" });
  }

  resume(): Promise<{ paused: boolean }> {
    return this.request("/run/resume", { method: "POST" });
  }

  chat(agentId: string, text: string): Promise<ChatReply> {
    return this.request(`/agents/${encodeURIComponent(agentId)}/chat`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  putEnvironment(csvText: string): Promise<EnvDiff> {
    return this.request("/environment", {
      method: "PUT",
      headers: { "content-type": "text/csv" },
      body: csvText,
    });
  }

  /** Consume GET /events, delivering each record once, with reconnection. */
  streamEvents(options: StreamOptions): StreamHandle {
    let closed = false;
    const backoff = options.backoffMs ?? 500;
    const maxRetries = options.maxRetries ?? 5;

    const loop = async () => {
      let failures = 0;
      while (!closed && failures < maxRetries) {
        try {
          const resp = await this.fetchFn(this.baseUrl + "/events");
          if (!resp.ok || resp.body === null) {
            throw new ApiError(resp.status, "event stream unavailable");
          }
          options.onStatus?.("connected");
          failures = 0;
          const reader = resp.body.getReader();
          const decoder = new TextDecoder();
          const parser = new SseParser();
          for (;;) {
            const { done, value } = await reader.read();
            if (closed) {
              await reader.cancel().catch(() => undefined);
              break;
            }
            if (done) break;
            for (const frame of parser.feed(decoder.decode(value, { stream: true }))) {
              const parsed: unknown = JSON.parse(frame.data);
              if (isLogRecord(parsed)) options.onRecord(parsed);
            }
          }
          // A server-side end of stream (idle timeout) is a normal event;
          // fall through to reconnect without counting it as a failure.
        } catch {
          failures += 1;
        }
        if (!closed) {
          options.onStatus?.("stale");
          await sleep(backoff * Math.min(2 ** failures, 16));
        }
      }
      options.onStatus?.("closed");
    };

    const done = loop();
    return {
      close() {
        closed = true;
      },
      done,
    };
  }
}

async function parseBody(resp: Response): Promise<unknown> {
  const text = await resp.text();
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}

function extractDetail(body: unknown): unknown {
  if (typeof body === "object" && body !== null && "detail" in body) {
    return (body as { detail: unknown }).detail;
  }
  return body;
}
