import type {
  ErrorBody,
  GraphStats,
  QueryLogRecord,
  QueryResponse,
  RetrieveResponse,
} from "./types.js";

/** Service-side failure: carries the machine-readable error class. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorBody,
  ) {
    super(`${body.class}: ${body.detail}`);
  }
}

/** Transport failure (server unreachable); the UI offers a retry. */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

export interface QueryRequest {
  graph_id: string;
  question: string;
  k?: number;
  current_node?: number;
  bare?: boolean;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.url(path), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(err);
    }
    const doc = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, (doc.error ?? {
        class: "unknown", stage: "unknown", detail: `HTTP ${resp.status}`,
      }) as ErrorBody);
    }
    return doc as T;
  }

  private async get<T>(path: string): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.url(path));
    } catch (err) {
      throw new NetworkError(err);
    }
    const doc = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, (doc.error ?? {
        class: "unknown", stage: "unknown", detail: `HTTP ${resp.status}`,
      }) as ErrorBody);
    }
    return doc as T;
  }

  listGraphs(): Promise<{ graphs: string[] }> {
    return this.get("/v1/graphs");
  }

  graphStats(graphId: string): Promise<GraphStats & { home_node: number }> {
    return this.get(`/v1/graphs/${encodeURIComponent(graphId)}/stats`);
  }

  uploadGraph(nodes: unknown, adjacency: unknown): Promise<{ graph_id: string; stats: GraphStats }> {
    return this.post("/v1/graphs", { nodes, adjacency });
  }

  retrieve(req: QueryRequest): Promise<RetrieveResponse> {
    return this.post("/v1/retrieve", req);
  }

  query(req: QueryRequest): Promise<QueryResponse> {
    return this.post("/v1/query", req);
  }

  logs(limit = 20): Promise<{ queries: QueryLogRecord[] }> {
    return this.get(`/v1/logs?limit=${limit}`);
  }

  async metricsText(): Promise<string> {
    let resp: Response;
    try {
      resp = await fetch(this.url("/metrics"));
    } catch (err) {
      throw new NetworkError(err);
    }
    return resp.text();
  }
}
