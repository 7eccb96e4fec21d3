/** Centered rolling mean with shrunken windows at the edges, so the
 * output has the same length as the input. Window 1 is the identity. */
export function centeredRollingMean(values: number[], window: number): number[] {
  if (!Number.isInteger(window) || window < 1) {
    throw new Error(`window must be a positive integer, got ${window}`);
  }
  if (window === 1) return values.slice();
  const left = Math.floor((window - 1) / 2);
  const right = Math.floor(window / 2);
  const out: number[] = [];
  for (let i = 0; i < values.length; i++) {
    const lo = Math.max(0, i - left);
    const hi = Math.min(values.length - 1, i + right);
    let sum = 0;
    for (let j = lo; j <= hi; j++) sum += values[j]!;
    out.push(sum / (hi - lo + 1));
  }
  return out;
}

export function mean(values: number[]): number {
  if (values.length === 0) {
    throw new Error('mean of empty series');
  }
  let sum = 0;
  for (const v of values) sum += v;
  return sum / values.length;
}
