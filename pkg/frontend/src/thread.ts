// Thread rendering: question, answers (accepted mark), comments attached
// below their posts, term-hit highlighting, link badges, raw-source toggle.

import { escapeHtml, highlightTerms, sanitizeHtml } from './sanitize.js';
import type { CommentPayload, PostPayload, ThreadPayload } from './types.js';

export function renderBody(
  html: string,
  terms: string[],
  raw: boolean,
): string {
  if (raw) {
    return `<pre class="raw-source">${escapeHtml(html)}</pre>`;
  }
  return highlightTerms(sanitizeHtml(html), terms);
}

function renderComments(comments: CommentPayload[] | undefined): string {
  if (!comments || comments.length === 0) return '';
  const items = comments
    .map(
      (c) =>
        `<li class="comment" data-comment-id="${c.id}">` +
        `<span class="score">${c.score}</span> ${escapeHtml(c.body)}</li>`,
    )
    .join('\n');
  return `<ul class="comments">${items}</ul>`;
}

function renderPost(
  post: PostPayload,
  thread: ThreadPayload,
  raw: boolean,
  accepted: boolean,
): string {
  const kindClass = post.post_kind === 'question' ? 'question' : 'answer';
  const acceptedMark = accepted
    ? '<span class="accepted" title="accepted answer">&#10003;</span>'
    : '';
  return `
  <article class="post ${kindClass}" data-post-id="${post.id}">
    <div class="gutter"><span class="score">${post.score}</span>${acceptedMark}</div>
    <div class="content">
      ${post.title ? `<h3>${escapeHtml(post.title)}</h3>` : ''}
      <div class="body">${renderBody(post.body, thread.search_terms, raw)}</div>
      ${
        post.tags.length > 0
          ? `<div class="tags">${post.tags
              .map((t) => `<span class="tag">${escapeHtml(t)}</span>`)
              .join(' ')}</div>`
          : ''
      }
      ${renderComments(thread.comments[String(post.id)])}
    </div>
  </article>`;
}

export function renderLinkBadges(thread: ThreadPayload): string {
  const badge = (peer: number, kind: string, mult: number, dir: string) =>
    `<span class="link-badge ${kind} ${dir}" title="${dir} ${kind} link">` +
    `${dir === 'in' ? '&larr;' : '&rarr;'} ` +
    `<a href="#/discussion/${peer}">${peer}</a>${mult > 1 ? ` &times;${mult}` : ''}</span>`;
  const incoming = thread.links.incoming.map((l) =>
    badge(l.peer, l.kind, l.multiplicity, 'in'),
  );
  const outgoing = thread.links.outgoing.map((l) =>
    badge(l.peer, l.kind, l.multiplicity, 'out'),
  );
  if (incoming.length === 0 && outgoing.length === 0) {
    return '<p class="pending">no incident links</p>';
  }
  return [...incoming, ...outgoing].join('\n');
}

export function renderThread(thread: ThreadPayload, raw = false): string {
  const q = thread.question;
  const answers = thread.answers
    .map((a) => renderPost(a, thread, raw, a.id === q.accepted_answer_id))
    .join('\n');
  const hitBadges = thread.term_hits
    .map(
      (h) =>
        `<span class="hit-badge" data-ref="${h.ref_id}">${escapeHtml(h.field)}</span>`,
    )
    .join(' ');
  return `
<section class="thread" data-discussion-id="${q.id}">
  <header>
    <span class="discussion-score" title="discussion score">${thread.discussion_score}</span>
    <span class="answer-count">${thread.answer_count} answers</span>
    ${hitBadges}
    <div class="links">${renderLinkBadges(thread)}</div>
  </header>
  ${renderPost(q, thread, raw, false)}
  ${answers}
</section>`;
}

// Side-by-side prior labels for the third reviewer on a conflict.
export function renderPriorLabels(thread: ThreadPayload): string {
  if (thread.consensus.status !== 'conflict') return '';
  const cards = thread.labels
    .map((l) => {
      const codes = Object.entries(l.codes)
        .filter(([, values]) => values.length > 0)
        .map(
          ([q, values]) =>
            `<dt>${escapeHtml(q)}</dt><dd>${escapeHtml(values.join(', '))}</dd>`,
        )
        .join('');
      return `
      <div class="prior-label">
        <h4>${escapeHtml(l.reviewer_id)}: ${escapeHtml(l.verdict)}${
          l.triggered_rule ? ` (${escapeHtml(l.triggered_rule)})` : ''
        }</h4>
        <dl>${codes}</dl>
        ${l.free_notes ? `<p>${escapeHtml(l.free_notes)}</p>` : ''}
      </div>`;
    })
    .join('\n');
  return `<aside class="conflict-panel"><h3>Conflicting labels</h3>${cards}</aside>`;
}
