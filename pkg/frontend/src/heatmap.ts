/**
 * Matrix panel view data for validation mode. Each graded matrix becomes a
 * 4x4 cell grid whose shading buckets follow the absolute error streamed in
 * the diff payload, so a student sees at a glance which entries are wrong
 * and how wrong they are.
 */

import type { WireDiff } from "./wire.js";

export type CellBucket = "zero" | "ok" | "warm" | "hot";

export interface HeatCell {
  row: number;
  col: number;
  value: number;
  bucket: CellBucket;
}

export interface MatrixPanel {
  index: number;
  passed: boolean;
  reason: string | null;
  maxAbsError: number;
  cells: HeatCell[];
  /** Row/col of the worst cells (ties included), empty when the matrix passed. */
  peaks: Array<[number, number]>;
}

export const DEFAULT_TOLERANCE = 1e-3;

export function bucketFor(absError: number, tolerance: number): CellBucket {
  if (absError === 0) {
    return "zero";
  }
  if (absError <= tolerance) {
    return "ok";
  }
  if (absError <= 100 * tolerance) {
    return "warm";
  }
  return "hot";
}

export function matrixPanel(diff: WireDiff, tolerance = DEFAULT_TOLERANCE): MatrixPanel {
  const cells: HeatCell[] = [];
  const peaks: Array<[number, number]> = [];
  const max = diff.max_abs_error;
  for (let i = 0; i < 16; i += 1) {
    const row = Math.floor(i / 4);
    const col = i % 4;
    const value = Math.abs(diff.diff[i] ?? 0);
    cells.push({ row, col, value, bucket: bucketFor(value, tolerance) });
    if (!diff.passed && max > 0 && value === max) {
      peaks.push([row, col]);
    }
  }
  return {
    index: diff.index,
    passed: diff.passed,
    reason: diff.reason,
    maxAbsError: max,
    cells,
    peaks,
  };
}

export function matrixPanels(diffs: WireDiff[], tolerance = DEFAULT_TOLERANCE): MatrixPanel[] {
  return diffs.map((d) => matrixPanel(d, tolerance));
}
