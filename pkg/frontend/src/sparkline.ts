// Best-error sparkline over polled progress snapshots. The service
// guarantees best_error never increases; the reducer keeps the running
// minimum anyway so a replayed or out-of-order snapshot cannot draw an
// uptick.

export interface ProgressSample {
  fes_used: number;
  best_error: number;
}

export function appendSample(
  series: ProgressSample[],
  fesUsed: number,
  bestError: number | null,
): ProgressSample[] {
  if (bestError === null || !Number.isFinite(bestError)) return series;
  const last = series[series.length - 1];
  const clamped = last ? Math.min(last.best_error, bestError) : bestError;
  if (last && fesUsed <= last.fes_used && clamped === last.best_error) {
    return series;
  }
  return [...series, { fes_used: fesUsed, best_error: clamped }];
}

export function isNonIncreasing(series: ProgressSample[]): boolean {
  return series.every(
    (s, i) => i === 0 || s.best_error <= series[i - 1].best_error,
  );
}

/** Scale the series into an SVG path on a log-ish vertical axis. */
export function sparklinePath(
  series: ProgressSample[],
  width: number,
  height: number,
): string {
  if (series.length === 0) return "";
  const xs = series.map((s) => s.fes_used);
  const ys = series.map((s) => Math.log10(Math.max(s.best_error, 1e-6)));
  const xMin = xs[0];
  const xMax = Math.max(xs[xs.length - 1], xMin + 1);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys, yMin + 1e-9);
  return series
    .map((s, i) => {
      const x = ((xs[i] - xMin) / (xMax - xMin)) * width;
      const y = ((ys[i] - yMin) / (yMax - yMin)) * height;
      return `${i === 0 ? "M" : "L"}${x.toFixed(2)},${(height - y).toFixed(2)}`;
    })
    .join(" ");
}
