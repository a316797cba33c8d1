// Typed client for the observer service. The four endpoints are the whole
// surface; the trial payload deliberately carries nothing but an id and two
// brightnesses.

export interface SessionInfo {
  session_id: string;
  trials_total: number;
  pacing_ms: number;
}

export interface TrialPayload {
  trial_id: number;
  left_brightness: number;
  right_brightness: number;
}

export type TrialResponse = TrialPayload | { complete: true };

export type Verdict = "LEFT" | "RIGHT" | "INCONCLUSIVE";

export interface AnswerAck {
  status: "accepted" | "duplicate";
  answered: number;
  conclusive: number;
  total: number;
}

export interface Results {
  E: Record<string, number | null>;
  sigma_E: Record<string, number | null>;
  S: number | null;
  sigma_S: number | null;
  success_probability: number | null;
  answered: number;
  conclusive: number;
  total: number;
  complete: boolean;
}

export function isComplete(trial: TrialResponse): trial is { complete: true } {
  return (trial as { complete?: boolean }).complete === true;
}

export class StaleTrialError extends Error {}

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ObserverApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (response.status === 409) {
      throw new StaleTrialError(await response.text());
    }
    if (!response.ok) {
      throw new ServiceError(await response.text(), response.status);
    }
    return response.json();
  }

  newSession(): Promise<SessionInfo> {
    return this.request("/session") as Promise<SessionInfo>;
  }

  getTrial(sessionId: string): Promise<TrialResponse> {
    return this.request(`/session/${sessionId}/trial`) as Promise<TrialResponse>;
  }

  postAnswer(
    sessionId: string,
    trialId: number,
    verdict: Verdict,
  ): Promise<AnswerAck> {
    return this.request(`/session/${sessionId}/answer`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ trial_id: trialId, verdict }),
    }) as Promise<AnswerAck>;
  }

  getResults(sessionId: string): Promise<Results> {
    return this.request(`/session/${sessionId}/results`) as Promise<Results>;
  }
}
