import { describe, expect, it } from 'vitest';

import { resolveShortcut, SHORTCUTS } from '../src/keyboard.js';

describe('resolveShortcut', () => {
  it('maps verdict and rule keys', () => {
    expect(resolveShortcut({ key: 'v' })?.action).toBe('verdict-valid');
    expect(resolveShortcut({ key: 'f' })?.action).toBe('verdict-false-positive');
    expect(resolveShortcut({ key: '2' })?.action).toBe('rule-2');
    expect(resolveShortcut({ key: 'Enter' })?.action).toBe('submit');
  });

  it('ignores keys while typing in form fields', () => {
    expect(
      resolveShortcut({ key: 'v', target: { tagName: 'TEXTAREA' } }),
    ).toBeNull();
    expect(
      resolveShortcut({ key: 'v', target: { tagName: 'INPUT' } }),
    ).toBeNull();
  });

  it('ignores chorded keys', () => {
    expect(resolveShortcut({ key: 'v', ctrlKey: true })).toBeNull();
    expect(resolveShortcut({ key: 'v', metaKey: true })).toBeNull();
  });

  it('returns null for unmapped keys', () => {
    expect(resolveShortcut({ key: 'z' })).toBeNull();
  });

  it('every shortcut has a unique key', () => {
    const keys = SHORTCUTS.map((s) => s.keys);
    expect(new Set(keys).size).toBe(keys.length);
  });
});
