import { FigureModel, FigureSeries } from './figures.js';

const WIDTH = 760;
const HEIGHT = 420;
const MARGIN = { top: 40, right: 160, bottom: 48, left: 72 };

const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#17becf'];

const fmt = (v: number) => {
  const s = v.toFixed(3);
  return s.replace(/\.?0+$/, '') || '0';
};

function ticks(lo: number, hi: number, count: number): number[] {
  if (lo === hi) return [lo];
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

/** Deterministic standalone SVG line chart: a fixed palette, min/max
 * bands where the series carries them, legend on the right. Same model
 * in, same bytes out. */
export function renderFigure(model: FigureModel): string {
  const points = model.series.flatMap((s) => s.points);
  const xs = points.map((p) => p.x);
  const ys = points.flatMap((p) => [p.y, p.lo ?? p.y, p.hi ?? p.y]);
  const xLo = xs.length ? Math.min(...xs) : 0;
  const xHi = xs.length ? Math.max(...xs) : 1;
  const yLo = 0; // both metrics are nonnegative; anchor the axis at zero
  const yHi = ys.length ? Math.max(...ys, 1e-9) : 1;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + (xHi === xLo ? plotW / 2 : ((x - xLo) / (xHi - xLo)) * plotW);
  const sy = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${MARGIN.left}" y="22" font-size="15" font-weight="bold">${model.benchmark}: ${model.metric}</text>`,
  );

  // axes and grid
  for (const t of ticks(yLo, yHi, 5)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${fmt(y + 4)}" text-anchor="end">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(xLo, xHi, Math.min(8, Math.max(1, xs.length - 1)))) {
    const x = sx(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top + plotH}" x2="${fmt(x)}" y2="${MARGIN.top + plotH + 4}" stroke="#333"/>`,
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + plotH}" x2="${MARGIN.left + plotW}" y2="${MARGIN.top + plotH}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${MARGIN.top + plotH}" stroke="#333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 10}" text-anchor="middle">${model.xLabel}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${model.yLabel}</text>`,
  );

  model.series.forEach((series, i) => {
    parts.push(renderSeries(series, PALETTE[i % PALETTE.length]!, sx, sy));
  });

  // legend
  model.series.forEach((series, i) => {
    const y = MARGIN.top + 16 * i;
    const x = MARGIN.left + plotW + 16;
    parts.push(
      `<line x1="${x}" y1="${y}" x2="${x + 18}" y2="${y}" stroke="${PALETTE[i % PALETTE.length]}" stroke-width="2"/>`,
      `<text x="${x + 24}" y="${y + 4}">${series.name}</text>`,
    );
  });

  parts.push('</svg>');
  return parts.join('\n');
}

function renderSeries(
  series: FigureSeries,
  color: string,
  sx: (x: number) => number,
  sy: (y: number) => number,
): string {
  const parts: string[] = [];
  parts.push(`<g class="series" data-name="${series.name}" data-points="${series.points.length}">`);
  const banded = series.points.filter((p) => p.lo !== undefined && p.hi !== undefined);
  if (banded.length > 1 && banded.some((p) => p.lo !== p.hi)) {
    const upper = banded.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.hi!))}`);
    const lower = [...banded].reverse().map((p) => `${fmt(sx(p.x))},${fmt(sy(p.lo!))}`);
    parts.push(
      `<polygon class="band" points="${[...upper, ...lower].join(' ')}" fill="${color}" opacity="0.15"/>`,
    );
  }
  const line = series.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(' ');
  parts.push(`<polyline points="${line}" fill="none" stroke="${color}" stroke-width="2"/>`);
  for (const p of series.points) {
    parts.push(`<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="2.5" fill="${color}"/>`);
  }
  parts.push('</g>');
  return parts.join('\n');
}
