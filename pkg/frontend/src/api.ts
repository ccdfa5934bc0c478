// REST wrappers: every console action maps to exactly one endpoint call.

import { CreateSessionResponse, MapDoc, Snapshot } from "./types.js";

export type Command =
  | "forward"
  | "backward"
  | "turn_left"
  | "turn_right"
  | "stop";

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const text = await response.text();
      throw new Error(`${method} ${path} -> ${response.status}: ${text}`);
    }
    return (await response.json()) as T;
  }

  getMap(): Promise<MapDoc> {
    return this.request<MapDoc>("GET", "/map");
  }

  createSession(
    config?: Record<string, unknown>,
  ): Promise<CreateSessionResponse> {
    return this.request<CreateSessionResponse>(
      "POST",
      "/sessions",
      config ? { config } : {},
    );
  }

  getSnapshot(sessionId: string): Promise<Snapshot> {
    return this.request<Snapshot>("GET", `/sessions/${sessionId}/snapshot`);
  }

  sendUtterance(sessionId: string, text: string): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/utterance`, { text });
  }

  sendCommand(sessionId: string, cmd: Command): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/command`, { cmd });
  }

  respondSuggestion(
    sessionId: string,
    response: "accept" | "reject",
  ): Promise<unknown> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/suggestion_response`,
      { response },
    );
  }

  advance(sessionId: string, dt: number): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/advance`, { dt });
  }

  closeSession(sessionId: string): Promise<unknown> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }
}
