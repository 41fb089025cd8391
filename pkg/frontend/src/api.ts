/** Typed client for the engine's HTTP API. */

export type Answer = "yes" | "no" | "dont_know";

export interface ContextSpan {
  role: string;
  start: number;
  end: number;
}

export interface ContextSentence {
  text: string;
  spans: ContextSpan[];
}

export interface QueryPayload {
  key?: string;
  description?: string;
  subject?: string;
  object?: string;
  relation_a?: string;
  relation_b?: string;
  [extra: string]: unknown;
}

export interface OracleQuery {
  id: string;
  kind: "pattern" | "relation" | "entity" | "conflict";
  relation_name: string;
  payload: QueryPayload;
  context: ContextSentence[];
  status: string;
  answer: Answer | null;
  iteration: number;
}

export interface CandidateRow {
  key: string;
  score: number;
  answer: Answer | null;
  accepted: boolean;
}

export interface RelationState {
  iteration: number;
  seed_set_sizes: { relations: number; patterns: number };
  last_cycle: { patterns: CandidateRow[]; relations: CandidateRow[] };
}

export interface RunState {
  iteration: number;
  relations: Record<string, RelationState>;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, `${init?.method ?? "GET"} ${path} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  fetchPending(): Promise<OracleQuery[]> {
    return this.request<OracleQuery[]>("/api/queries/pending");
  }

  submitAnswer(id: string, answer: Answer): Promise<OracleQuery> {
    return this.request<OracleQuery>(`/api/queries/${encodeURIComponent(id)}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ answer }),
    });
  }

  fetchState(): Promise<RunState> {
    return this.request<RunState>("/api/state");
  }
}

/** Tracks in-flight submissions so a double-click produces a single POST. */
export class SubmitGuard {
  private inFlight = new Set<string>();

  begin(id: string): boolean {
    if (this.inFlight.has(id)) {
      return false;
    }
    this.inFlight.add(id);
    return true;
  }

  end(id: string): void {
    this.inFlight.delete(id);
  }
}
