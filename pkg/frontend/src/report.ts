import fs from 'node:fs';
import path from 'node:path';

import { parseCsv } from './csv.js';
import {
  EfficiencyRow,
  FigureModel,
  ThroughputRow,
  detectKind,
  efficiencyFigures,
  parseEfficiency,
  parseThroughput,
  throughputFigures,
} from './figures.js';
import { renderFigure } from './svg.js';

export interface ReportSpec {
  inputs: string[];
  outDir: string;
  /** centered rolling-mean width for efficiency series */
  window: number;
  /** optional scheme filter; absent schemes produce a warning */
  schemes?: string[];
  /** optional benchmark filter */
  benchmarks?: string[];
}

export interface ReportResult {
  written: string[];
  warnings: string[];
}

export function generateReport(spec: ReportSpec): ReportResult {
  if (spec.inputs.length === 0) {
    throw new Error('no input CSVs given');
  }
  if (!Number.isInteger(spec.window) || spec.window < 1) {
    throw new Error(`window must be a positive integer, got ${spec.window}`);
  }

  const throughput: ThroughputRow[] = [];
  const efficiency: EfficiencyRow[] = [];
  for (const input of spec.inputs) {
    const table = parseCsv(fs.readFileSync(input, 'utf-8'));
    if (table.rows.length === 0) {
      throw new Error(`empty input: ${input} has a header but no data rows`);
    }
    if (detectKind(table) === 'throughput') {
      throughput.push(...parseThroughput(table));
    } else {
      efficiency.push(...parseEfficiency(table));
    }
  }

  const warnings: string[] = [];
  const keepBenchmark = <T extends { benchmark: string }>(rows: T[]) =>
    spec.benchmarks ? rows.filter((r) => spec.benchmarks!.includes(r.benchmark)) : rows;
  for (const [label, rows] of [
    ['throughput', throughput],
    ['efficiency', efficiency],
  ] as const) {
    if (rows.length === 0) continue;
    const present = new Set(rows.map((r) => r.scheme));
    for (const scheme of spec.schemes ?? []) {
      if (!present.has(scheme)) {
        warnings.push(`scheme ${scheme} absent from ${label} data; series omitted`);
      }
    }
    if (spec.benchmarks) {
      const benchmarks = new Set(rows.map((r) => r.benchmark));
      for (const benchmark of spec.benchmarks) {
        if (!benchmarks.has(benchmark)) {
          warnings.push(`benchmark ${benchmark} absent from ${label} data`);
        }
      }
    }
  }

  const figures: FigureModel[] = [
    ...throughputFigures(keepBenchmark(throughput), spec.schemes),
    ...efficiencyFigures(keepBenchmark(efficiency), spec.window, spec.schemes),
  ];

  fs.mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const figure of figures) {
    const file = path.join(spec.outDir, `${figure.benchmark}-${figure.metric}.svg`);
    fs.writeFileSync(file, renderFigure(figure));
    written.push(file);
  }
  return { written, warnings };
}
