// Single-page wiring: screening view + metrics dashboard over the review
// service. All state transitions live in the imported modules; this file
// only touches the DOM.

import { ApiClient, newRequestToken } from './api.js';
import { buildDashboard, renderDashboard } from './dashboard.js';
import {
  LabelDraft,
  draftToLabel,
  emptyDraft,
  toggleTdType,
  validateDraft,
} from './form.js';
import { resolveShortcut, SHORTCUTS } from './keyboard.js';
import { ScreeningSession } from './queue.js';
import { renderPriorLabels, renderThread } from './thread.js';
import type { ThreadPayload } from './types.js';

const TD_TYPES = [
  'architecture', 'automation_test', 'build', 'code', 'defect', 'design',
  'documentation', 'infrastructure', 'people', 'process', 'requirements',
  'service', 'test', 'usability', 'versioning',
];
const RULES: Record<string, string> = {
  R1: 'not about technical debt',
  R2: 'no real scenario described',
  R3: 'indicators not from the author',
  R4: 'practice not backed by others',
};

interface AppState {
  api: ApiClient;
  session: ScreeningSession | null;
  thread: ThreadPayload | null;
  draft: LabelDraft;
  rawView: boolean;
  view: 'screening' | 'dashboard';
}

const root = document.getElementById('app') as HTMLElement;
let state: AppState | null = null;

function reviewerId(): string {
  let reviewer = localStorage.getItem('glsb-reviewer');
  if (!reviewer) {
    reviewer = window.prompt('Reviewer id (e.g. r3):') || 'anonymous';
    localStorage.setItem('glsb-reviewer', reviewer);
  }
  return reviewer;
}

function projectId(): string {
  const fromHash = window.location.hash.match(/project=([^&/]+)/);
  return fromHash ? decodeURIComponent(fromHash[1]) : 'demo-fixture';
}

function formHtml(draft: LabelDraft): string {
  const errors = new Map(
    validateDraft(draft).map((e) => [e.field, e.message]),
  );
  const typeBoxes = TD_TYPES.map(
    (code) => `
    <label class="td-type"><input type="checkbox" data-td-type="${code}"
      ${draft.tdTypes.includes(code) ? 'checked' : ''}
      ${draft.verdict !== 'valid' ? 'disabled' : ''}> ${code}</label>`,
  ).join('\n');
  const ruleOptions = Object.entries(RULES)
    .map(
      ([rule, text]) => `
      <label class="rule"><input type="radio" name="rule" value="${rule}"
        ${draft.rule === rule ? 'checked' : ''}
        ${draft.verdict !== 'false_positive' ? 'disabled' : ''}> ${rule}: ${text}</label>`,
    )
    .join('\n');
  return `
  <form id="label-form" class="label-form">
    <div class="verdict-toggle">
      <button type="button" data-verdict="valid"
        class="${draft.verdict === 'valid' ? 'active' : ''}">valid (v)</button>
      <button type="button" data-verdict="false_positive"
        class="${draft.verdict === 'false_positive' ? 'active' : ''}">false positive (f)</button>
      ${errors.has('verdict') ? `<span class="error">${errors.get('verdict')}</span>` : ''}
    </div>
    <fieldset class="rules">${ruleOptions}
      ${errors.has('rule') ? `<span class="error">${errors.get('rule')}</span>` : ''}
    </fieldset>
    <fieldset class="td-types">${typeBoxes}
      ${errors.has('tdTypes') ? `<span class="error">${errors.get('tdTypes')}</span>` : ''}
    </fieldset>
    <input id="indicators" placeholder="TD indicators (q2, comma separated)"
      value="${draft.indicators.join(', ')}">
    <input id="practices" placeholder="Management practices (q3, comma separated)"
      value="${draft.practices.join(', ')}">
    <textarea id="notes" placeholder="notes">${draft.notes}</textarea>
    <button type="submit" ${validateDraft(draft).length > 0 ? 'disabled' : ''}>
      submit (Enter)</button>
  </form>`;
}

function shortcutsHtml(): string {
  const rows = SHORTCUTS.map(
    (s) => `<tr><td><kbd>${s.keys}</kbd></td><td>${s.description}</td></tr>`,
  ).join('');
  return `<details class="help"><summary>keyboard shortcuts (?)</summary>
    <table>${rows}</table></details>`;
}

async function renderScreening(): Promise<void> {
  if (!state || !state.session) return;
  const session = state.session;
  if (session.complete) {
    root.innerHTML = `
      <div class="complete">
        <h2>Screening complete</h2>
        <p>No discussions are waiting for ${session.reviewer}.</p>
        <a href="#/dashboard">See the dashboard</a>
      </div>`;
    return;
  }
  const current = session.current as number;
  if (!state.thread || state.thread.question.id !== current) {
    state.thread = await state.api.thread(current);
    state.draft = emptyDraft();
  }
  root.innerHTML = `
    <div class="screening">
      <p class="queue-meta">${session.remaining.length} in queue for
        ${session.reviewer}${session.lastError ? ` &middot; <span class="error">${session.lastError}</span>` : ''}</p>
      ${renderPriorLabels(state.thread)}
      ${renderThread(state.thread, state.rawView)}
      ${formHtml(state.draft)}
      ${shortcutsHtml()}
    </div>`;
  wireForm();
}

function wireForm(): void {
  const form = document.getElementById('label-form');
  if (!form || !state) return;
  form.querySelectorAll('[data-verdict]').forEach((button) => {
    button.addEventListener('click', () => {
      if (!state) return;
      state.draft = {
        ...state.draft,
        verdict: (button as HTMLElement).dataset.verdict as 'valid' | 'false_positive',
      };
      void renderScreening();
    });
  });
  form.querySelectorAll('[data-td-type]').forEach((box) => {
    box.addEventListener('change', () => {
      if (!state) return;
      state.draft = toggleTdType(
        state.draft,
        (box as HTMLElement).dataset.tdType as string,
      );
      void renderScreening();
    });
  });
  form.querySelectorAll('input[name=rule]').forEach((radio) => {
    radio.addEventListener('change', () => {
      if (!state) return;
      state.draft = { ...state.draft, rule: (radio as HTMLInputElement).value };
      void renderScreening();
    });
  });
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void submitCurrent();
  });
}

function readFreeFields(): void {
  if (!state) return;
  const split = (id: string) =>
    ((document.getElementById(id) as HTMLInputElement)?.value ?? '')
      .split(',')
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
  state.draft = {
    ...state.draft,
    indicators: split('indicators'),
    practices: split('practices'),
    notes: (document.getElementById('notes') as HTMLTextAreaElement)?.value ?? '',
  };
}

async function submitCurrent(): Promise<void> {
  if (!state || !state.session || state.session.current === null) return;
  readFreeFields();
  if (validateDraft(state.draft).length > 0) {
    await renderScreening();
    return;
  }
  const label = draftToLabel(
    state.draft,
    state.session.current,
    state.session.reviewer,
    newRequestToken(),
  );
  const outcome = await state.session.submit(label);
  if (outcome.ok) {
    state.thread = null;
    state.draft = emptyDraft();
  }
  await renderScreening();
}

async function renderDashboardView(): Promise<void> {
  if (!state) return;
  const records = await state.api.report();
  root.innerHTML = renderDashboard(buildDashboard(records)) +
    '<p><a href="#/screening">Back to screening</a></p>';
}

function onKey(event: KeyboardEvent): void {
  if (!state || state.view !== 'screening') return;
  const shortcut = resolveShortcut(event);
  if (!shortcut) return;
  event.preventDefault();
  switch (shortcut.action) {
    case 'verdict-valid':
      state.draft = { ...state.draft, verdict: 'valid' };
      void renderScreening();
      break;
    case 'verdict-false-positive':
      state.draft = { ...state.draft, verdict: 'false_positive' };
      void renderScreening();
      break;
    case 'rule-1':
    case 'rule-2':
    case 'rule-3':
    case 'rule-4':
      state.draft = { ...state.draft, rule: `R${shortcut.action.slice(-1)}` };
      void renderScreening();
      break;
    case 'submit':
      void submitCurrent();
      break;
    case 'skip':
      state.session?.skip();
      state.thread = null;
      void renderScreening();
      break;
    case 'toggle-raw':
      state.rawView = !state.rawView;
      void renderScreening();
      break;
    case 'help':
      document.querySelector('.help')?.toggleAttribute('open');
      break;
  }
}

async function route(): Promise<void> {
  if (!state) return;
  state.view = window.location.hash.includes('dashboard')
    ? 'dashboard'
    : 'screening';
  if (state.view === 'dashboard') {
    await renderDashboardView();
  } else {
    await renderScreening();
  }
}

export async function boot(): Promise<void> {
  const api = new ApiClient('', projectId());
  const session = new ScreeningSession(api, reviewerId());
  state = {
    api,
    session,
    thread: null,
    draft: emptyDraft(),
    rawView: false,
    view: 'screening',
  };
  await session.load();
  window.addEventListener('hashchange', () => void route());
  window.addEventListener('keydown', onKey);
  await route();
}

if (typeof window !== 'undefined' && document.getElementById('app')) {
  void boot();
}
