// Allowlist sanitizer for discussion bodies (the platform stores HTML).
// Anything outside the allowlist is escaped and shown as text, which is
// also what the raw-source toggle relies on. Single-team tool: the goal is
// not to render junk or rogue scripts, not to survive adversarial input
// from the open web.

const ALLOWED_TAGS = new Set([
  'p', 'br', 'b', 'i', 'em', 'strong', 'code', 'pre', 'ul', 'ol', 'li',
  'blockquote', 'h1', 'h2', 'h3', 'hr',
]);

const TAG_RE = /<\/?([a-zA-Z][a-zA-Z0-9]*)((?:\s[^<>]*?)?)\/?>/g;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function sanitizeHtml(html: string): string {
  let out = '';
  let last = 0;
  for (const match of html.matchAll(TAG_RE)) {
    const index = match.index ?? 0;
    out += escapeHtml(html.slice(last, index));
    const [whole, rawName] = match;
    const name = rawName.toLowerCase();
    if (ALLOWED_TAGS.has(name)) {
      // attributes dropped wholesale: nothing in the allowlist needs them
      out += whole.startsWith('</') ? `</${name}>` : `<${name}>`;
    } else if (name === 'a') {
      // links become their text; the raw toggle shows the target
      out += '';
    } else {
      out += escapeHtml(whole);
    }
    last = index + whole.length;
  }
  out += escapeHtml(html.slice(last));
  return out;
}

// Wrap term occurrences in <mark>, but only inside text segments so the
// markup produced by sanitizeHtml stays intact.
export function highlightTerms(sanitized: string, terms: string[]): string {
  if (terms.length === 0) return sanitized;
  const pattern = new RegExp(
    `(${terms.map((t) => t.replace(/[.*+?^${}()|[\]\\]/g, '\\$&')).join('|')})`,
    'gi',
  );
  return sanitized
    .split(/(<[^>]*>)/)
    .map((segment) =>
      segment.startsWith('<')
        ? segment
        : segment.replace(pattern, '<mark>$1</mark>'),
    )
    .join('');
}
