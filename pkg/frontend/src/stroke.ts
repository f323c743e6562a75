import { Point, tailWindow } from "./geometry.js";

export interface CapturedStroke {
  polyline: Point[];
  timestamps: number[];
}

/**
 * State of one continuous pointer-down -> pointer-up gesture.
 *
 * The full point list is kept for submission; rendering is restricted to
 * the tail window so the trace erases itself on screen as the stylus moves.
 * Finishing returns the captured stroke exactly once; anything else (a
 * second finish, extending while inactive) is ignored, which makes the
 * surrounding event wiring forgiving of stray browser events.
 */
export class StrokeRecorder {
  private points: Point[] = [];
  private stamps: number[] = [];
  private active = false;

  constructor(readonly tailWindowSize: number) {
    if (tailWindowSize < 0) throw new Error("tail window must be >= 0");
  }

  begin(p: Point, timestampMs: number): void {
    this.points = [p];
    this.stamps = [timestampMs];
    this.active = true;
  }

  extend(p: Point, timestampMs: number): void {
    if (!this.active) return;
    this.points.push(p);
    this.stamps.push(timestampMs);
  }

  /** End the gesture; returns the full stroke or null if none was active. */
  finish(): CapturedStroke | null {
    if (!this.active) return null;
    this.active = false;
    return { polyline: this.points.slice(), timestamps: this.stamps.slice() };
  }

  cancel(): void {
    this.active = false;
    this.points = [];
    this.stamps = [];
  }

  get isActive(): boolean {
    return this.active;
  }

  get size(): number {
    return this.points.length;
  }

  /** The only points the canvas may show while drawing. */
  get visibleTail(): Point[] {
    return tailWindow(this.points, this.tailWindowSize);
  }
}
