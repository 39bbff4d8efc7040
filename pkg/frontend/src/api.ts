// HTTP client for the review service.  All mutating calls carry an
// idempotency key supplied by the caller, so a form can reuse one key
// across retries and the server deduplicates.

import type {
  AdjudicationBody,
  AdjudicationResponse,
  DecisionBody,
  DecisionResponse,
  EdgeDetail,
  ExplanationBundle,
  GraphDocument,
  HealthResponse,
  QueueResponse,
  ValidatorRole,
} from './types.js';

export class ApiError extends Error {
  status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }
}

export function newIdempotencyKey(): string {
  return crypto.randomUUID();
}

export class ValidationApi {
  private baseUrl: string;
  private token: string | null;

  constructor(baseUrl: string = '', token: string | null = null) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
    this.token = token;
  }

  setToken(token: string | null): void {
    this.token = token;
  }

  private headers(idempotencyKey?: string): Record<string, string> {
    const headers: Record<string, string> = {
      'content-type': 'application/json',
    };
    if (this.token) {
      headers['authorization'] = `Bearer ${this.token}`;
    }
    if (idempotencyKey) {
      headers['idempotency-key'] = idempotencyKey;
    }
    return headers;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    idempotencyKey?: string
  ): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(idempotencyKey),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = `request failed with status ${response.status}`;
      try {
        const data = await response.json();
        if (data && typeof data.detail === 'string') {
          detail = data.detail;
        }
      } catch {
        // non-JSON error body, keep the generic message
      }
      throw new ApiError(response.status, detail);
    }
    return response.json() as Promise<T>;
  }

  health(): Promise<HealthResponse> {
    return this.request('GET', '/health');
  }

  queue(role: ValidatorRole, batchSize: number = 10): Promise<QueueResponse> {
    return this.request(
      'GET',
      `/queue?role=${encodeURIComponent(role)}&batch_size=${batchSize}`
    );
  }

  submitDecision(
    body: DecisionBody,
    idempotencyKey: string
  ): Promise<DecisionResponse> {
    return this.request('POST', '/decisions', body, idempotencyKey);
  }

  adjudicate(
    edgeId: string,
    body: AdjudicationBody,
    idempotencyKey: string
  ): Promise<AdjudicationResponse> {
    return this.request(
      'POST',
      `/adjudications/${encodeURIComponent(edgeId)}`,
      body,
      idempotencyKey
    );
  }

  edgeDetail(edgeId: string): Promise<EdgeDetail> {
    return this.request('GET', `/edges/${encodeURIComponent(edgeId)}`);
  }

  explanation(edgeId: string): Promise<ExplanationBundle> {
    return this.request(
      'GET',
      `/edges/${encodeURIComponent(edgeId)}/explanation`
    );
  }

  graphExport(): Promise<GraphDocument> {
    return this.request('GET', '/graph/export');
  }
}
