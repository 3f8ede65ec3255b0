import { describe, expect, it } from 'vitest';

import { formatTotal, sigFigs } from '../src/format.js';

describe('sigFigs', () => {
  it('rounds to significant figures', () => {
    expect(sigFigs(1.9207294103470618, 3)).toBe('1.92');
    expect(sigFigs(0.14286417101755006, 2)).toBe('0.14');
    expect(sigFigs(0.006914625877249422, 2)).toBe('0.0069');
    expect(sigFigs(8.894977268301144, 4)).toBe('8.895');
    expect(sigFigs(0, 3)).toBe('0');
  });

  it('formats totals at four significant figures', () => {
    expect(formatTotal(17.789954536602288)).toBe('17.79');
  });
});
