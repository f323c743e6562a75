import { normalizePoint, Point } from "./geometry.js";
import { StrokeRecorder } from "./stroke.js";

/**
 * Wire pointer events on the overlay canvas to a StrokeRecorder.
 *
 * One pointer-down -> pointer-up gesture is one submission; the server is
 * the sole judge of where the stroke ended, so the client never maps points
 * to cells. Pointer capture keeps the gesture alive if the cursor briefly
 * leaves the canvas; normalizePoint clamps any outside samples to the edge.
 * Returns a detach function.
 */
export function attachDrawingSurface(
  canvas: HTMLCanvasElement,
  recorder: StrokeRecorder,
  onFinish: (polyline: Point[], timestamps: number[]) => void,
  onCancel?: () => void,
): () => void {
  const toPoint = (ev: PointerEvent): Point => {
    const rect = canvas.getBoundingClientRect();
    return normalizePoint(ev.clientX, ev.clientY, {
      left: rect.left,
      top: rect.top,
      width: rect.width,
      height: rect.height,
    });
  };

  const render = () => {
    const ctx = canvas.getContext ? canvas.getContext("2d") : null;
    if (!ctx) return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const tail = recorder.visibleTail;
    if (tail.length < 2) return;
    ctx.strokeStyle = "#2a6fb8";
    ctx.lineWidth = 4;
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    ctx.beginPath();
    ctx.moveTo(tail[0][0] * canvas.width, tail[0][1] * canvas.height);
    for (const [x, y] of tail.slice(1)) {
      ctx.lineTo(x * canvas.width, y * canvas.height);
    }
    ctx.stroke();
  };

  const down = (ev: PointerEvent) => {
    ev.preventDefault();
    canvas.setPointerCapture?.(ev.pointerId);
    recorder.begin(toPoint(ev), ev.timeStamp);
    render();
  };

  const move = (ev: PointerEvent) => {
    if (!recorder.isActive) return;
    recorder.extend(toPoint(ev), ev.timeStamp);
    render();
  };

  const up = (ev: PointerEvent) => {
    if (!recorder.isActive) return;
    recorder.extend(toPoint(ev), ev.timeStamp);
    const stroke = recorder.finish();
    render();
    if (stroke) onFinish(stroke.polyline, stroke.timestamps);
  };

  // a system-interrupted gesture (palm rejection, focus loss) is discarded,
  // never submitted; the caller decides how to recover
  const cancel = () => {
    if (!recorder.isActive) return;
    recorder.cancel();
    render();
    onCancel?.();
  };

  canvas.addEventListener("pointerdown", down);
  canvas.addEventListener("pointermove", move);
  canvas.addEventListener("pointerup", up);
  canvas.addEventListener("pointercancel", cancel);
  return () => {
    canvas.removeEventListener("pointerdown", down);
    canvas.removeEventListener("pointermove", move);
    canvas.removeEventListener("pointerup", up);
    canvas.removeEventListener("pointercancel", cancel);
  };
}
