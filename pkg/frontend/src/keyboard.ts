// Keyboard-driven screening: hundreds of items per iteration means the
// verdict entry path must not need the mouse.

export interface ShortcutAction {
  keys: string;
  description: string;
  action:
    | 'verdict-valid'
    | 'verdict-false-positive'
    | 'rule-1'
    | 'rule-2'
    | 'rule-3'
    | 'rule-4'
    | 'submit'
    | 'skip'
    | 'toggle-raw'
    | 'help';
}

export const SHORTCUTS: ShortcutAction[] = [
  { keys: 'v', description: 'Mark valid', action: 'verdict-valid' },
  { keys: 'f', description: 'Mark false positive', action: 'verdict-false-positive' },
  { keys: '1', description: 'Rule R1 (not about TD)', action: 'rule-1' },
  { keys: '2', description: 'Rule R2 (no real scenario)', action: 'rule-2' },
  { keys: '3', description: 'Rule R3 (indicator not from author)', action: 'rule-3' },
  { keys: '4', description: 'Rule R4 (practice not backed)', action: 'rule-4' },
  { keys: 'Enter', description: 'Submit label', action: 'submit' },
  { keys: 'j', description: 'Skip to next item', action: 'skip' },
  { keys: 'r', description: 'Toggle raw HTML source', action: 'toggle-raw' },
  { keys: '?', description: 'Show shortcuts', action: 'help' },
];

const BY_KEY = new Map(SHORTCUTS.map((s) => [s.keys, s]));

export interface KeyLike {
  key: string;
  target?: unknown;
  metaKey?: boolean;
  ctrlKey?: boolean;
  altKey?: boolean;
}

export function resolveShortcut(event: KeyLike): ShortcutAction | null {
  // never steal keys from text entry
  const tag = (event.target as { tagName?: string } | null)?.tagName?.toLowerCase();
  if (tag === 'input' || tag === 'textarea' || tag === 'select') return null;
  if (event.metaKey || event.ctrlKey || event.altKey) return null;
  return BY_KEY.get(event.key) ?? null;
}
