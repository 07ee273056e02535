/**
 * Typed client for the riskreach session API.
 *
 * Every exchange can be recorded through a TrafficRecorder so tests can
 * audit the full conversation; the end-to-end suite replays a session
 * and asserts that no payload outside a committed choice response ever
 * names the robot's action.
 */

import type {
  BlockOrder,
  ChoiceResult,
  FitReport,
  HumanAction,
  SessionHandle,
  SessionSummary,
  TrialInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: string,
    method: string,
    path: string,
  ) {
    super(`${method} ${path} -> ${status}: ${body}`);
    this.name = "ApiError";
  }
}

export interface Exchange {
  method: string;
  path: string;
  requestBody: string | null;
  status: number;
  responseBody: string;
}

export class TrafficRecorder {
  readonly exchanges: Exchange[] = [];

  record(exchange: Exchange): void {
    this.exchanges.push(exchange);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface CreateSessionOptions {
  order?: BlockOrder;
  seed?: number;
  participantId?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly recorder: TrafficRecorder | null = null,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<string> {
    const requestBody = body === undefined ? null : JSON.stringify(body);
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: requestBody === null ? undefined : { "content-type": "application/json" },
      body: requestBody ?? undefined,
    });
    const text = await response.text();
    if (this.recorder) {
      this.recorder.record({
        method,
        path,
        requestBody,
        status: response.status,
        responseBody: text,
      });
    }
    if (!response.ok) {
      throw new ApiError(response.status, text, method, path);
    }
    return text;
  }

  async createSession(options: CreateSessionOptions = {}): Promise<SessionHandle> {
    return JSON.parse(await this.request("POST", "/sessions", options)) as SessionHandle;
  }

  async nextTrial(sessionId: string): Promise<TrialInfo> {
    return JSON.parse(await this.request("GET", `/sessions/${sessionId}/next`)) as TrialInfo;
  }

  async submitChoice(
    sessionId: string,
    humanAction: HumanAction,
    holdMs?: number,
  ): Promise<ChoiceResult> {
    const body: { humanAction: HumanAction; holdMs?: number } = { humanAction };
    if (holdMs !== undefined) {
      body.holdMs = holdMs;
    }
    return JSON.parse(
      await this.request("POST", `/sessions/${sessionId}/choice`, body),
    ) as ChoiceResult;
  }

  async summary(sessionId: string): Promise<SessionSummary> {
    return JSON.parse(await this.request("GET", `/sessions/${sessionId}/summary`)) as SessionSummary;
  }

  /** Latest per-block fit, or null while no block has completed yet. */
  async latestFit(sessionId: string): Promise<FitReport | null> {
    try {
      return JSON.parse(await this.request("GET", `/sessions/${sessionId}/fit`)) as FitReport;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        return null;
      }
      throw err;
    }
  }
}
