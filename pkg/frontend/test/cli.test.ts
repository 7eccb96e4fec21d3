import fs from 'node:fs';
import os from 'node:os';
import path from 'node:path';

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { main } from '../src/cli.js';

const THROUGHPUT_HEADER = 'benchmark,scheme,threads,trial,thread_id,ops,runtime_ns,ns_per_op';

let workDir: string;
let logs: string[];
let errors: string[];

beforeEach(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), 'cli-test-'));
  logs = [];
  errors = [];
  vi.spyOn(console, 'log').mockImplementation((...parts: unknown[]) => {
    logs.push(parts.join(' '));
  });
  vi.spyOn(console, 'error').mockImplementation((...parts: unknown[]) => {
    errors.push(parts.join(' '));
  });
});

afterEach(() => {
  vi.restoreAllMocks();
  fs.rmSync(workDir, { recursive: true, force: true });
});

function throughputFixture(): string {
  const file = path.join(workDir, 'throughput.csv');
  const lines = [THROUGHPUT_HEADER];
  for (const trial of [0, 1]) {
    lines.push(`queue,alpha,2,${trial},0,1000,500000,500`);
  }
  fs.writeFileSync(file, lines.join('\n') + '\n');
  return file;
}

describe('cli main', () => {
  it('writes figures and prints their paths', () => {
    const out = path.join(workDir, 'figures');
    const code = main(['--in', throughputFixture(), '--out', out, '--window', '3']);
    expect(code).toBe(0);
    expect(errors).toEqual([]);
    expect(logs).toEqual([path.join(out, 'queue-throughput.svg')]);
    expect(fs.existsSync(logs[0]!)).toBe(true);
  });

  it('routes warnings to stderr but still succeeds', () => {
    const out = path.join(workDir, 'figures');
    const code = main([
      '--in',
      throughputFixture(),
      '--out',
      out,
      '--scheme',
      'alpha',
      '--scheme',
      'ghost',
    ]);
    expect(code).toBe(0);
    expect(errors).toEqual(['warning: scheme ghost absent from throughput data; series omitted']);
  });

  it('fails with usage when --out is missing', () => {
    const code = main(['--in', 'whatever.csv']);
    expect(code).toBe(1);
    expect(errors[0]).toContain('--out is required');
    expect(errors.join('\n')).toContain('usage: report');
    expect(logs).toEqual([]);
  });

  it('fails with usage when no --in is given', () => {
    const code = main(['--out', workDir]);
    expect(code).toBe(1);
    expect(errors[0]).toContain('at least one --in is required');
  });

  it('rejects unknown flags and dangling values', () => {
    expect(main(['--frobnicate'])).toBe(1);
    expect(errors[0]).toContain('unknown flag --frobnicate');
    errors = [];
    expect(main(['--in'])).toBe(1);
    expect(errors[0]).toContain('--in needs a value');
  });

  it('prints usage and succeeds on --help', () => {
    expect(main(['--help'])).toBe(0);
    expect(logs.join('\n')).toContain('usage: report');
    expect(errors).toEqual([]);
  });

  it('fails when filters leave nothing to draw', () => {
    const out = path.join(workDir, 'figures');
    const code = main(['--in', throughputFixture(), '--out', out, '--benchmark', 'hashmap']);
    expect(code).toBe(1);
    expect(errors).toContain('report: no figures produced (inputs matched no data)');
  });

  it('reports file errors without a stack trace', () => {
    const code = main(['--in', path.join(workDir, 'missing.csv'), '--out', workDir]);
    expect(code).toBe(1);
    expect(errors[0]).toMatch(/^report: .*missing\.csv/);
  });
});
