// Label form state. Client-side checks mirror the server's invariants so
// obviously-broken submissions are blocked before the network; the server
// remains authoritative.

import type { LabelPayload, Verdict } from './types.js';
import { Q1_TD_TYPES, Q2_INDICATORS, Q3_PRACTICES } from './types.js';

export interface LabelDraft {
  verdict: Verdict | null;
  rule: string | null;
  tdTypes: string[];
  indicators: string[];
  practices: string[];
  notes: string;
}

export function emptyDraft(): LabelDraft {
  return {
    verdict: null,
    rule: null,
    tdTypes: [],
    indicators: [],
    practices: [],
    notes: '',
  };
}

export interface FieldError {
  field: string;
  message: string;
}

export function validateDraft(draft: LabelDraft): FieldError[] {
  const errors: FieldError[] = [];
  if (draft.verdict === null) {
    errors.push({ field: 'verdict', message: 'pick a verdict' });
    return errors;
  }
  if (draft.verdict === 'false_positive' && !draft.rule) {
    errors.push({
      field: 'rule',
      message: 'a false positive needs the rule that fired',
    });
  }
  if (draft.verdict === 'valid' && draft.tdTypes.length === 0) {
    errors.push({
      field: 'tdTypes',
      message: 'a valid discussion needs at least one debt type',
    });
  }
  return errors;
}

export function toggleTdType(draft: LabelDraft, code: string): LabelDraft {
  const tdTypes = draft.tdTypes.includes(code)
    ? draft.tdTypes.filter((c) => c !== code)
    : [...draft.tdTypes, code].sort();
  return { ...draft, tdTypes };
}

export function draftToLabel(
  draft: LabelDraft,
  discussionId: number,
  reviewer: string,
  requestToken: string,
  now: () => string = () => new Date().toISOString(),
): LabelPayload {
  const errors = validateDraft(draft);
  if (errors.length > 0 || draft.verdict === null) {
    throw new Error(`draft not submittable: ${JSON.stringify(errors)}`);
  }
  return {
    discussion_id: discussionId,
    reviewer_id: reviewer,
    verdict: draft.verdict,
    triggered_rule: draft.verdict === 'false_positive' ? draft.rule : null,
    codes: {
      [Q1_TD_TYPES]: draft.verdict === 'valid' ? draft.tdTypes : [],
      [Q2_INDICATORS]: draft.indicators,
      [Q3_PRACTICES]: draft.practices,
    },
    free_notes: draft.notes,
    created_at: now(),
    request_token: requestToken,
  };
}
