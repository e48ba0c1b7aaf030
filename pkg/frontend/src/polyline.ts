// Parallel-coordinates geometry for the solutions view: one polyline per
// solution across the ingredient axes, each axis normalised by the
// ingredient's stock so grams, kilograms and millilitres are comparable.

import type { ClusterReport, IngredientRecord, Solution } from "./types.js";

export interface Axis {
  name: string;
  kind: string;
  stock: number;
}

export interface PolylinePoint {
  x: number; // axis position in [0, 1]
  y: number; // uptake proportion in [0, 1] (quantity / stock)
}

export interface SolutionPolyline {
  trial: number;
  cluster: number | null;
  dimmed: boolean;
  points: PolylinePoint[];
  solution: Solution;
}

export function axesFromInventory(records: IngredientRecord[]): Axis[] {
  return records.map((r) => ({ name: r.name, kind: r.kind, stock: r.stock }));
}

export function uptakeProportion(quantity: number, stock: number): number {
  if (stock <= 0) return 0;
  return Math.min(1, Math.max(0, quantity / stock));
}

/** One polyline per solution; cluster ids attach when a report is present,
 * and solutions outside the selected cluster render dimmed. */
export function buildPolylines(
  solutions: Solution[],
  axes: Axis[],
  clusterReport: ClusterReport | null = null,
  selectedCluster: number | null = null,
): SolutionPolyline[] {
  const n = axes.length;
  return solutions.map((solution, index) => {
    const cluster =
      clusterReport && index < clusterReport.assignments.length
        ? clusterReport.assignments[index]
        : null;
    const points = axes.map((axis, i) => ({
      x: n <= 1 ? 0 : i / (n - 1),
      y: uptakeProportion(solution.recipe[axis.name] ?? 0, axis.stock),
    }));
    return {
      trial: solution.trial,
      cluster,
      dimmed: selectedCluster !== null && cluster !== selectedCluster,
      points,
      solution,
    };
  });
}

/** SVG path string for a polyline inside a width x height viewport
 * (y grows downward in SVG, so proportions are flipped). */
export function toSvgPath(
  line: SolutionPolyline,
  width: number,
  height: number,
): string {
  return line.points
    .map((p, i) => {
      const x = (p.x * width).toFixed(2);
      const y = ((1 - p.y) * height).toFixed(2);
      return `${i === 0 ? "M" : "L"}${x},${y}`;
    })
    .join(" ");
}

export function clusterIds(report: ClusterReport | null): number[] {
  if (!report) return [];
  return Array.from({ length: report.k }, (_, i) => i);
}
