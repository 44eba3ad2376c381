// Wire types mirroring the review service's JSON payloads. The server is
// authoritative; nothing here re-derives metrics.

export type Verdict = 'valid' | 'false_positive';

export type ConsensusStatus = 'pending' | 'agreed' | 'conflict' | 'resolved';

export const Q1_TD_TYPES = 'q1_td_types';
export const Q2_INDICATORS = 'q2_indicators';
export const Q3_PRACTICES = 'q3_practices';

export interface PostPayload {
  id: number;
  post_kind: 'question' | 'answer';
  parent_id: number | null;
  title: string | null;
  body: string;
  tags: string[];
  score: number;
  owner_id: number | null;
  accepted_answer_id: number | null;
  created_at: string;
}

export interface CommentPayload {
  id: number;
  post_id: number;
  body: string;
  score: number;
  author_id: number | null;
}

export interface TermHit {
  field: string;
  ref_id: number;
}

export interface LinkBadge {
  peer: number;
  kind: 'linked' | 'related';
  multiplicity: number;
}

export interface LabelPayload {
  discussion_id: number;
  reviewer_id: string;
  verdict: Verdict;
  triggered_rule: string | null;
  codes: Record<string, string[]>;
  free_notes: string;
  created_at: string;
  request_token: string | null;
}

export interface ConsensusPayload {
  discussion_id: number;
  status: ConsensusStatus;
  resolved_verdict: Verdict | null;
  codes: Record<string, string[]>;
  reviewers: string[];
}

export interface ThreadPayload {
  question: PostPayload;
  answers: PostPayload[];
  comments: Record<string, CommentPayload[]>;
  discussion_score: number;
  answer_count: number;
  search_terms: string[];
  term_hits: TermHit[];
  links: { incoming: LinkBadge[]; outgoing: LinkBadge[] };
  consensus: ConsensusPayload;
  labels: LabelPayload[];
}

// One line of the structured (ndjson) report.
export interface SourceRecord {
  record: 'source';
  source: string;
  candidates: number;
  valid: number;
  precision: [number, number] | null;
  precision_pct: number | null;
  precision_pct_1dp: string | null;
}

export interface OverlapRecord {
  record: 'overlap';
  provenance: string[];
  count: number;
}

export interface TopCitedRecord {
  record: 'top_cited';
  discussion_id: number;
  linked_in: number;
  related_in: number;
  total: number;
}

export interface SummaryRecord {
  record: 'summary';
  combined_precision: [number, number] | null;
  combined_precision_pct: number | null;
  recall_gain: [number, number] | null;
  recall_gain_pct: number | null;
  generated_at: string;
}

export type ReportRecord =
  | SourceRecord
  | OverlapRecord
  | TopCitedRecord
  | SummaryRecord;
