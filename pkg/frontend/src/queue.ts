// Screening session: walks the reviewer's queue with optimistic advance.
// A failed submit reinstates the item at the front and surfaces the error.

import type { ApiClient } from './api.js';
import type { ConsensusPayload, LabelPayload } from './types.js';

export interface SubmitOutcome {
  ok: boolean;
  consensus?: ConsensusPayload;
  error?: string;
}

export class ScreeningSession {
  private items: number[] = [];
  lastError: string | null = null;

  constructor(
    private readonly api: Pick<ApiClient, 'queue' | 'submitLabel'>,
    readonly reviewer: string,
  ) {}

  async load(): Promise<void> {
    this.items = await this.api.queue(this.reviewer);
  }

  get remaining(): number[] {
    return [...this.items];
  }

  get current(): number | null {
    return this.items.length > 0 ? this.items[0] : null;
  }

  get complete(): boolean {
    return this.items.length === 0;
  }

  async submit(label: LabelPayload): Promise<SubmitOutcome> {
    const item = this.items.shift(); // optimistic advance
    try {
      const consensus = await this.api.submitLabel(label);
      this.lastError = null;
      return { ok: true, consensus };
    } catch (err) {
      if (item !== undefined) {
        this.items.unshift(item); // reinstate on failure
      }
      this.lastError = err instanceof Error ? err.message : String(err);
      return { ok: false, error: this.lastError };
    }
  }

  skip(): void {
    const item = this.items.shift();
    if (item !== undefined) {
      this.items.push(item);
    }
  }
}
