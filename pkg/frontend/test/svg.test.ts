import { describe, expect, it } from 'vitest';

import { FigureModel } from '../src/figures.js';
import { renderFigure } from '../src/svg.js';

function model(series: FigureModel['series']): FigureModel {
  return {
    benchmark: 'queue',
    metric: 'throughput',
    xLabel: 'threads',
    yLabel: 'ns / operation',
    series,
  };
}

describe('renderFigure', () => {
  it('tags each series with its name and point count', () => {
    const svg = renderFigure(
      model([
        {
          name: 'alpha',
          points: [
            { x: 1, y: 10, lo: 8, hi: 12 },
            { x: 2, y: 20, lo: 15, hi: 25 },
          ],
        },
      ]),
    );
    expect(svg).toContain('<g class="series" data-name="alpha" data-points="2">');
    expect(svg).toContain('class="band"');
    expect(svg).toContain('<polyline');
  });

  it('omits the band when min and max coincide everywhere', () => {
    const svg = renderFigure(
      model([
        {
          name: 'alpha',
          points: [
            { x: 1, y: 10, lo: 10, hi: 10 },
            { x: 2, y: 20, lo: 20, hi: 20 },
          ],
        },
      ]),
    );
    expect(svg).not.toContain('class="band"');
  });

  it('renders an empty figure without crashing', () => {
    const svg = renderFigure(model([]));
    expect(svg.startsWith('<svg ')).toBe(true);
    expect(svg.endsWith('</svg>')).toBe(true);
  });

  it('is a pure function of the model', () => {
    const m = model([{ name: 'alpha', points: [{ x: 1, y: 3 }] }]);
    expect(renderFigure(m)).toBe(renderFigure(m));
  });
});
