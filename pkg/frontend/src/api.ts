// Typed read-only client for the gridscope service. The UI never issues
// anything but GETs; concurrent fetches for one view slot are guarded by
// LatestGate so a stale response can never overwrite a newer one.

import type {
  DetailPayload,
  EntitiesPayload,
  GridPayload,
  Metric,
  TimeFormat,
  TimelinePayload,
  TopicPayload,
  WindowsPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function readError(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { error?: string };
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `HTTP ${res.status}`;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async getJson<T>(path: string, params?: Record<string, string | number>): Promise<T> {
    let url = this.baseUrl + path;
    if (params) {
      const query = new URLSearchParams();
      for (const [key, value] of Object.entries(params)) query.set(key, String(value));
      url += `?${query.toString()}`;
    }
    const res = await fetch(url, { method: "GET", headers: { Accept: "application/json" } });
    if (!res.ok) throw new ApiError(res.status, await readError(res));
    return (await res.json()) as T;
  }

  entities(): Promise<EntitiesPayload> {
    return this.getJson("/api/entities");
  }

  windows(): Promise<WindowsPayload> {
    return this.getJson("/api/windows");
  }

  topic(topicId: string): Promise<TopicPayload> {
    return this.getJson(`/api/topics/${encodeURIComponent(topicId)}`);
  }

  grid(entity: string, window: number, metric: Metric): Promise<GridPayload> {
    return this.getJson("/api/grid", { entity, window, metric });
  }

  detail(entity: string, window: number, topic: string): Promise<DetailPayload> {
    return this.getJson("/api/detail", { entity, window, topic });
  }

  timeline(entity: string, metric: Metric, format: TimeFormat): Promise<TimelinePayload> {
    return this.getJson("/api/timeline", { entity, metric, format });
  }
}

/** Monotonic token issuer: only the most recently issued token is current. */
export class LatestGate {
  private token = 0;

  issue(): number {
    return ++this.token;
  }

  isCurrent(token: number): boolean {
    return token === this.token;
  }
}
