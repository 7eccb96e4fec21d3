export interface Table {
  columns: string[];
  rows: string[][];
}

/** Minimal CSV reader: comma-separated, optional double-quoting, one
 * header row. The harness never emits embedded newlines, but quoted
 * commas and doubled quotes are handled so hand-edited files survive. */
export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error('empty CSV: no header row');
  }
  const records = lines.map(splitLine);
  const columns = records[0]!;
  const rows = records.slice(1);
  for (const [i, row] of rows.entries()) {
    if (row.length !== columns.length) {
      throw new Error(`row ${i + 2}: expected ${columns.length} fields, got ${row.length}`);
    }
  }
  return { columns, rows };
}

function splitLine(line: string): string[] {
  const fields: string[] = [];
  let field = '';
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i]!;
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ',') {
      fields.push(field);
      field = '';
    } else {
      field += ch;
    }
  }
  fields.push(field);
  return fields;
}

export function requireColumns(table: Table, required: readonly string[], label: string): void {
  const missing = required.filter((name) => !table.columns.includes(name));
  if (missing.length > 0) {
    throw new Error(`${label}: missing required columns ${missing.join(', ')}`);
  }
}

/** Column-order-independent accessor for one row. */
export function indexer(table: Table): (row: string[], column: string) => string {
  const at = new Map(table.columns.map((name, i) => [name, i]));
  return (row, column) => {
    const i = at.get(column);
    if (i === undefined) {
      throw new Error(`unknown column ${column}`);
    }
    return row[i]!;
  };
}
