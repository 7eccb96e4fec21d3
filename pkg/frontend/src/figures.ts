import { Table, indexer, requireColumns } from './csv.js';
import { centeredRollingMean, mean } from './rolling.js';

export const THROUGHPUT_COLUMNS = [
  'benchmark',
  'scheme',
  'threads',
  'trial',
  'thread_id',
  'ops',
  'runtime_ns',
  'ns_per_op',
] as const;

export const EFFICIENCY_COLUMNS = [
  'benchmark',
  'scheme',
  'threads',
  'run',
  'trial',
  'sample',
  'unreclaimed',
  'allocated',
  'reclaimed',
] as const;

export interface ThroughputRow {
  benchmark: string;
  scheme: string;
  threads: number;
  trial: number;
  nsPerOp: number;
}

export interface EfficiencyRow {
  benchmark: string;
  scheme: string;
  run: number;
  trial: number;
  sample: number;
  unreclaimed: number;
}

export type CsvKind = 'throughput' | 'efficiency';

export function detectKind(table: Table): CsvKind {
  if (table.columns.includes('ns_per_op')) return 'throughput';
  if (table.columns.includes('unreclaimed')) return 'efficiency';
  throw new Error(
    `unrecognized CSV: columns [${table.columns.join(', ')}] match neither throughput nor efficiency`,
  );
}

function toNumber(raw: string, column: string): number {
  const value = Number(raw);
  if (raw.trim() === '' || Number.isNaN(value)) {
    throw new Error(`column ${column}: not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

export function parseThroughput(table: Table): ThroughputRow[] {
  requireColumns(table, THROUGHPUT_COLUMNS, 'throughput CSV');
  const at = indexer(table);
  return table.rows.map((row) => ({
    benchmark: at(row, 'benchmark'),
    scheme: at(row, 'scheme'),
    threads: toNumber(at(row, 'threads'), 'threads'),
    trial: toNumber(at(row, 'trial'), 'trial'),
    nsPerOp: toNumber(at(row, 'ns_per_op'), 'ns_per_op'),
  }));
}

export function parseEfficiency(table: Table): EfficiencyRow[] {
  requireColumns(table, EFFICIENCY_COLUMNS, 'efficiency CSV');
  const at = indexer(table);
  return table.rows.map((row) => ({
    benchmark: at(row, 'benchmark'),
    scheme: at(row, 'scheme'),
    run: toNumber(at(row, 'run'), 'run'),
    trial: toNumber(at(row, 'trial'), 'trial'),
    sample: toNumber(at(row, 'sample'), 'sample'),
    unreclaimed: toNumber(at(row, 'unreclaimed'), 'unreclaimed'),
  }));
}

export interface SeriesPoint {
  x: number;
  y: number;
  /** min/max band across trials; equal to y when there is one trial */
  lo?: number;
  hi?: number;
}

export interface FigureSeries {
  name: string;
  points: SeriesPoint[];
}

export interface FigureModel {
  benchmark: string;
  metric: CsvKind;
  xLabel: string;
  yLabel: string;
  series: FigureSeries[];
}

function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = groups.get(k);
    if (bucket) bucket.push(item);
    else groups.set(k, [item]);
  }
  return groups;
}

const sorted = (names: Iterable<string>) => [...names].sort();

/** One figure per benchmark: one series per scheme, x = threads,
 * y = mean ns/op over all trials and worker threads, lo/hi = min/max. */
export function throughputFigures(rows: ThroughputRow[], schemes?: string[]): FigureModel[] {
  const figures: FigureModel[] = [];
  for (const benchmark of sorted(groupBy(rows, (r) => r.benchmark).keys())) {
    const inBenchmark = rows.filter((r) => r.benchmark === benchmark);
    const series: FigureSeries[] = [];
    for (const scheme of sorted(groupBy(inBenchmark, (r) => r.scheme).keys())) {
      if (schemes && !schemes.includes(scheme)) continue;
      const mine = inBenchmark.filter((r) => r.scheme === scheme);
      const points: SeriesPoint[] = [];
      const byThreads = groupBy(mine, (r) => String(r.threads));
      for (const threads of [...byThreads.keys()].map(Number).sort((a, b) => a - b)) {
        const values = byThreads.get(String(threads))!.map((r) => r.nsPerOp);
        points.push({
          x: threads,
          y: mean(values),
          lo: Math.min(...values),
          hi: Math.max(...values),
        });
      }
      series.push({ name: scheme, points });
    }
    figures.push({
      benchmark,
      metric: 'throughput',
      xLabel: 'threads',
      yLabel: 'ns / operation',
      series,
    });
  }
  return figures;
}

/** One figure per benchmark: one series per scheme, x = sample index
 * across a run's trials, y = unreclaimed nodes averaged over runs and
 * smoothed with a centered rolling mean. */
export function efficiencyFigures(
  rows: EfficiencyRow[],
  window: number,
  schemes?: string[],
): FigureModel[] {
  const figures: FigureModel[] = [];
  for (const benchmark of sorted(groupBy(rows, (r) => r.benchmark).keys())) {
    const inBenchmark = rows.filter((r) => r.benchmark === benchmark);
    const series: FigureSeries[] = [];
    for (const scheme of sorted(groupBy(inBenchmark, (r) => r.scheme).keys())) {
      if (schemes && !schemes.includes(scheme)) continue;
      const mine = inBenchmark.filter((r) => r.scheme === scheme);
      const samplesPerTrial = Math.max(...mine.map((r) => r.sample)) + 1;
      const byIndex = groupBy(mine, (r) => String(r.trial * samplesPerTrial + r.sample));
      const indexes = [...byIndex.keys()].map(Number).sort((a, b) => a - b);
      const means = indexes.map((i) => mean(byIndex.get(String(i))!.map((r) => r.unreclaimed)));
      const smoothed = centeredRollingMean(means, window);
      series.push({
        name: scheme,
        points: indexes.map((x, i) => ({ x, y: smoothed[i]! })),
      });
    }
    figures.push({
      benchmark,
      metric: 'efficiency',
      xLabel: 'sample index',
      yLabel: 'unreclaimed nodes',
      series,
    });
  }
  return figures;
}
