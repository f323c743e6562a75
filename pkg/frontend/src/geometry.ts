/**
 * Pure geometry helpers shared by the drawing surface and the grid renderer.
 */

export type Point = [number, number];

export interface CanvasBounds {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Map a pointer position to normalized [0,1]^2 drawing coordinates. */
export function normalizePoint(px: number, py: number, bounds: CanvasBounds): Point {
  if (!(bounds.width > 0) || !(bounds.height > 0)) {
    throw new Error("canvas bounds are degenerate");
  }
  const clamp = (v: number) => Math.min(1, Math.max(0, v));
  return [clamp((px - bounds.left) / bounds.width), clamp((py - bounds.top) / bounds.height)];
}

/**
 * The erasure window: only the last `w` captured points are ever rendered,
 * while the full stroke is retained in memory for submission.
 */
export function tailWindow<T>(points: readonly T[], w: number): T[] {
  if (w < 0) throw new Error("tail window must be >= 0");
  if (w === 0) return [];
  return points.slice(Math.max(0, points.length - w));
}

export interface ChallengeEndpoints {
  head_cell: number;
  tail_cell: number;
}

export type CellFrame = "head" | "tail" | null;

/** Which marker frame a grid cell carries: red head, green tail, or none. */
export function cellFrameStyle(cell: number, challenge: ChallengeEndpoints): CellFrame {
  if (cell === challenge.head_cell) return "head";
  if (cell === challenge.tail_cell) return "tail";
  return null;
}

export const FRAME_COLORS: Record<Exclude<CellFrame, null>, string> = {
  head: "#d62828",
  tail: "#1b9e3e",
};

/** Center of a row-major cell in normalized coordinates. */
export function cellCenter(cell: number, cols: number, rows: number): Point {
  const row = Math.floor(cell / cols);
  const col = cell % cols;
  return [(col + 0.5) / cols, (row + 0.5) / rows];
}
