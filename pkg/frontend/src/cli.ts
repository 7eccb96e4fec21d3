#!/usr/bin/env node
import { pathToFileURL } from 'node:url';

import { generateReport } from './report.js';

const USAGE = `usage: report --in <csv> [--in <csv> ...] --out <dir> [options]

Turns benchmark CSVs (throughput and/or efficiency, detected by header)
into one SVG figure per benchmark and metric.

options:
  --in <csv>          input CSV; repeatable
  --out <dir>         output directory (created if missing)
  --window <n>        centered rolling-mean width for efficiency (default 5)
  --scheme <name>     keep only this scheme; repeatable
  --benchmark <name>  keep only this benchmark; repeatable
  -h, --help          show this help`;

interface Args {
  inputs: string[];
  out?: string;
  window: number;
  schemes: string[];
  benchmarks: string[];
}

class HelpRequested extends Error {}

function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], window: 5, schemes: [], benchmarks: [] };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]!;
    const next = () => {
      const value = argv[++i];
      if (value === undefined) throw new Error(`${flag} needs a value`);
      return value;
    };
    switch (flag) {
      case '--in':
        args.inputs.push(next());
        break;
      case '--out':
        args.out = next();
        break;
      case '--window':
        args.window = Number(next());
        break;
      case '--scheme':
        args.schemes.push(next());
        break;
      case '--benchmark':
        args.benchmarks.push(next());
        break;
      case '-h':
      case '--help':
        throw new HelpRequested();
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (!args.out) throw new Error('--out is required');
    if (args.inputs.length === 0) throw new Error('at least one --in is required');
  } catch (err) {
    if (err instanceof HelpRequested) {
      console.log(USAGE);
      return 0;
    }
    console.error(`report: ${(err as Error).message}`);
    console.error(USAGE);
    return 1;
  }
  try {
    const result = generateReport({
      inputs: args.inputs,
      outDir: args.out,
      window: args.window,
      schemes: args.schemes.length ? args.schemes : undefined,
      benchmarks: args.benchmarks.length ? args.benchmarks : undefined,
    });
    for (const warning of result.warnings) console.error(`warning: ${warning}`);
    for (const file of result.written) console.log(file);
    if (result.written.length === 0) {
      console.error('report: no figures produced (inputs matched no data)');
      return 1;
    }
    return 0;
  } catch (err) {
    console.error(`report: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
