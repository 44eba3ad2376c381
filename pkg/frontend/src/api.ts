// Thin fetch client for the review service. Every mutation carries a
// request token so retries stay idempotent on the server side.

import type {
  ConsensusPayload,
  LabelPayload,
  ReportRecord,
  ThreadPayload,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === 'string' ? detail : JSON.stringify(detail));
  }
}

async function expectOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail: unknown = resp.statusText;
    try {
      detail = (await resp.json()).detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return resp;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    readonly projectId: string,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}/projects/${this.projectId}${path}`;
  }

  async queue(reviewer: string): Promise<number[]> {
    const resp = await expectOk(
      await fetch(this.url(`/queue?reviewer=${encodeURIComponent(reviewer)}`)),
    );
    return (await resp.json()).queue as number[];
  }

  async thread(discussionId: number): Promise<ThreadPayload> {
    const resp = await expectOk(await fetch(this.url(`/discussions/${discussionId}`)));
    return (await resp.json()) as ThreadPayload;
  }

  async submitLabel(label: LabelPayload): Promise<ConsensusPayload> {
    const resp = await expectOk(
      await fetch(this.url('/labels'), {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(label),
      }),
    );
    return (await resp.json()) as ConsensusPayload;
  }

  async report(): Promise<ReportRecord[]> {
    const resp = await expectOk(
      await fetch(this.url('/report?format=structured')),
    );
    const text = await resp.text();
    return text
      .trim()
      .split('\n')
      .filter((line) => line.length > 0)
      .map((line) => JSON.parse(line) as ReportRecord);
  }
}

export function newRequestToken(): string {
  return `ui-${Date.now()}-${Math.random().toString(36).slice(2, 10)}`;
}
