import { describe, expect, it } from 'vitest';

import { indexer, parseCsv, requireColumns } from '../src/csv.js';

describe('parseCsv', () => {
  it('parses header and rows', () => {
    const table = parseCsv('a,b\n1,2\n3,4\n');
    expect(table.columns).toEqual(['a', 'b']);
    expect(table.rows).toEqual([
      ['1', '2'],
      ['3', '4'],
    ]);
  });

  it('handles quoted fields with commas and escaped quotes', () => {
    const table = parseCsv('name,note\n"x,y","said ""hi"""\n');
    expect(table.rows[0]).toEqual(['x,y', 'said "hi"']);
  });

  it('tolerates CRLF line endings and trailing blank lines', () => {
    const table = parseCsv('a,b\r\n1,2\r\n\r\n');
    expect(table.rows).toEqual([['1', '2']]);
  });

  it('rejects empty input', () => {
    expect(() => parseCsv('')).toThrow(/no header row/);
  });

  it('rejects rows with the wrong field count', () => {
    expect(() => parseCsv('a,b\n1\n')).toThrow(/row 2: expected 2 fields, got 1/);
  });
});

describe('requireColumns / indexer', () => {
  it('accepts a table with the required columns in any order', () => {
    const table = parseCsv('b,a\n2,1\n');
    expect(() => requireColumns(table, ['a', 'b'], 'demo')).not.toThrow();
    const at = indexer(table);
    expect(at(table.rows[0]!, 'a')).toBe('1');
    expect(at(table.rows[0]!, 'b')).toBe('2');
  });

  it('names the missing columns', () => {
    const table = parseCsv('a\n1\n');
    expect(() => requireColumns(table, ['a', 'b', 'c'], 'demo')).toThrow(
      /demo: missing required columns b, c/,
    );
  });
});
