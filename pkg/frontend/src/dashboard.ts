// Metrics dashboard: parses the structured report into a view model and
// renders it. All numbers come from the server; this file only formats.

import { escapeHtml } from './sanitize.js';
import type {
  OverlapRecord,
  ReportRecord,
  SourceRecord,
  SummaryRecord,
  TopCitedRecord,
} from './types.js';

export const SOURCE_ORDER = [
  'search',
  'LinkedBSB',
  'LinkedFSB',
  'RelatedBSB',
  'RelatedFSB',
  'AllSB',
] as const;

export const SOURCE_TITLES: Record<string, string> = {
  search: 'Search',
  LinkedBSB: 'Linked BSB',
  LinkedFSB: 'Linked FSB',
  RelatedBSB: 'Related BSB',
  RelatedFSB: 'Related FSB',
  AllSB: 'All snowballing',
};

const STRATEGY_SHORT: Record<string, string> = {
  LinkedBSB: 'LB',
  LinkedFSB: 'LF',
  RelatedBSB: 'RB',
  RelatedFSB: 'RF',
};

export interface DashboardModel {
  sources: SourceRecord[];
  overlap: OverlapRecord[];
  topCited: TopCitedRecord[];
  summary: SummaryRecord | null;
  pending: boolean; // nothing labeled or no iterations yet
}

export function buildDashboard(records: ReportRecord[]): DashboardModel {
  const sources = records.filter(
    (r): r is SourceRecord => r.record === 'source',
  );
  const ordered = SOURCE_ORDER.map((name) =>
    sources.find((s) => s.source === name),
  ).filter((s): s is SourceRecord => s !== undefined);
  const summary =
    records.find((r): r is SummaryRecord => r.record === 'summary') ?? null;
  return {
    sources: ordered,
    overlap: records.filter((r): r is OverlapRecord => r.record === 'overlap'),
    topCited: records.filter(
      (r): r is TopCitedRecord => r.record === 'top_cited',
    ),
    summary,
    pending: ordered.length === 0 || ordered.every((s) => s.valid === 0),
  };
}

export function precisionDisplay(source: SourceRecord): string {
  if (source.precision_pct === null) return 'pending';
  return `${source.precision_pct}% (${source.precision_pct_1dp}%)`;
}

function sourceRow(source: SourceRecord): string {
  const pct = source.precision_pct ?? 0;
  return `
    <div class="metric-row" data-source="${escapeHtml(source.source)}">
      <span class="metric-name">${escapeHtml(SOURCE_TITLES[source.source] ?? source.source)}</span>
      <span class="metric-counts">${source.valid} / ${source.candidates}</span>
      <span class="bar"><span class="bar-fill" style="width:${pct}%"></span></span>
      <span class="metric-pct">${escapeHtml(precisionDisplay(source))}</span>
    </div>`;
}

export function renderDashboard(model: DashboardModel): string {
  if (model.pending && model.sources.length === 0) {
    return '<section class="dashboard"><p class="pending">Metrics pending: no screened iterations yet.</p></section>';
  }
  const rows = model.sources.map(sourceRow).join('\n');
  const summary = model.summary;
  const combined =
    summary && summary.combined_precision_pct !== null
      ? `${summary.combined_precision_pct}%`
      : 'pending';
  const gain =
    summary && summary.recall_gain_pct !== null
      ? `${summary.recall_gain_pct}%`
      : 'pending';
  const overlapRows = model.overlap
    .map((row) => {
      const combo = row.provenance
        .map((s) => STRATEGY_SHORT[s] ?? s)
        .join(' + ');
      return `<tr><td>${escapeHtml(combo)}</td><td>${row.count}</td></tr>`;
    })
    .join('\n');
  const cited = model.topCited
    .map(
      (row) =>
        `<li><a href="#/discussion/${row.discussion_id}">${row.discussion_id}</a>: ` +
        `${row.total} citations (${row.linked_in} linked, ${row.related_in} related)</li>`,
    )
    .join('\n');
  return `
<section class="dashboard">
  <h2>Precision by source</h2>
  <div class="metrics">${rows}</div>
  <p class="combined">Combined (search + snowballing): <strong>${combined}</strong>
     &middot; Relative recall gain: <strong>${gain}</strong></p>
  <h2>Overlapping discoveries</h2>
  ${
    model.overlap.length > 0
      ? `<table class="overlap"><thead><tr><th>Strategies</th><th>Discussions</th></tr></thead><tbody>${overlapRows}</tbody></table>`
      : '<p class="pending">none</p>'
  }
  <h2>Most cited</h2>
  ${model.topCited.length > 0 ? `<ul class="top-cited">${cited}</ul>` : '<p class="pending">none</p>'}
  <p class="generated">Generated at ${escapeHtml(summary?.generated_at ?? '')}</p>
</section>`;
}
