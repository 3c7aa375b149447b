/** HTTP client for the pipeline service. */

import type { FillPlan, SessionView } from './types';

export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super(`cannot reach the pipeline service: ${String(cause)}`);
    this.name = 'ServiceUnreachable';
  }
}

export class RequestFailed extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(`service request failed (${status}): ${detail}`);
    this.name = 'RequestFailed';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the session controller needs from the service. */
export interface PipelineServiceApi {
  createSession(): Promise<string>;
  uploadAudio(sessionId: string, wav: Blob, filename?: string): Promise<SessionView>;
  run(sessionId: string): Promise<SessionView>;
  getSession(sessionId: string): Promise<SessionView>;
  getFillPlan(sessionId: string): Promise<FillPlan>;
}

export class ServiceClient implements PipelineServiceApi {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  async createSession(): Promise<string> {
    const body = await this.requestJson('/v1/sessions', { method: 'POST' });
    return body.session_id as string;
  }

  async uploadAudio(sessionId: string, wav: Blob, filename = 'consultation.wav'): Promise<SessionView> {
    const form = new FormData();
    form.append('file', wav, filename);
    return (await this.requestJson(`/v1/sessions/${sessionId}/audio`, {
      method: 'POST',
      body: form,
    })) as SessionView;
  }

  async run(sessionId: string): Promise<SessionView> {
    return (await this.requestJson(`/v1/sessions/${sessionId}/run`, {
      method: 'POST',
    })) as SessionView;
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return (await this.requestJson(`/v1/sessions/${sessionId}`)) as SessionView;
  }

  async getFillPlan(sessionId: string): Promise<FillPlan> {
    return (await this.requestJson(`/v1/sessions/${sessionId}/fill-plan`)) as FillPlan;
  }

  async healthy(): Promise<boolean> {
    try {
      await this.requestJson('/healthz');
      return true;
    } catch {
      return false;
    }
  }

  private async requestJson(path: string, init?: RequestInit): Promise<any> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (cause) {
      throw new ServiceUnreachable(cause);
    }
    if (!response.ok) {
      let detail = '';
      try {
        const body = await response.json();
        detail = typeof body?.detail === 'string' ? body.detail : JSON.stringify(body);
      } catch {
        detail = response.statusText;
      }
      throw new RequestFailed(response.status, detail);
    }
    return response.json();
  }
}
