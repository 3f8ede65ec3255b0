/** Typed client for the /v1 planning service. */

import type { FieldError, PlanRequest, PlanResult, ServiceMetadata } from './types.js';

/** A 422 response carrying field-level validation messages. */
export class PlanServiceError extends Error {
  constructor(public readonly errors: FieldError[]) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join('; '));
    this.name = 'PlanServiceError';
  }
}

export class PlanClient {
  constructor(private baseUrl: string) {}

  setBaseUrl(url: string): void {
    this.baseUrl = url.replace(/\/+$/, '');
  }

  getBaseUrl(): string {
    return this.baseUrl;
  }

  async evaluate(request: PlanRequest, signal?: AbortSignal): Promise<PlanResult> {
    const response = await fetch(`${this.baseUrl}/plan`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(request),
      signal,
    });
    if (response.status === 422) {
      const body = (await response.json()) as { errors?: FieldError[] };
      throw new PlanServiceError(
        body.errors ?? [{ field: '', message: 'invalid request' }],
      );
    }
    if (!response.ok) {
      throw new Error(`plan request failed with status ${response.status}`);
    }
    return (await response.json()) as PlanResult;
  }

  async metadata(signal?: AbortSignal): Promise<ServiceMetadata> {
    const response = await fetch(`${this.baseUrl}/metadata`, { signal });
    if (!response.ok) {
      throw new Error(`metadata request failed with status ${response.status}`);
    }
    return (await response.json()) as ServiceMetadata;
  }
}
