/** REST client for the session service. */

import type { SessionView, Transcript, TurnResult } from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class TutorApi {
  private readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      try {
        const body: unknown = await response.json();
        if (body && typeof body === "object" && "detail" in body) {
          detail = String((body as { detail: unknown }).detail);
        }
      } catch {
        // keep the status line
      }
      throw new ApiError(response.status, detail);
    }
    return response.json() as Promise<T>;
  }

  createSession(topic: string): Promise<SessionView> {
    return this.request<SessionView>("/api/sessions", {
      method: "POST",
      body: JSON.stringify({ topic }),
    });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request<SessionView>(`/api/sessions/${sessionId}`);
  }

  submitAnswer(sessionId: string, answer: string): Promise<TurnResult> {
    return this.request<TurnResult>(`/api/sessions/${sessionId}/answer`, {
      method: "POST",
      body: JSON.stringify({ answer }),
    });
  }

  getTranscript(sessionId: string): Promise<Transcript> {
    return this.request<Transcript>(`/api/sessions/${sessionId}/transcript`);
  }

  health(): Promise<{ status: string; provider: string }> {
    return this.request<{ status: string; provider: string }>("/api/healthz");
  }
}
