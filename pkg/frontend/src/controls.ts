/** Pointer-to-control mapping with per-frame coalescing.
 *
 * Drags emit one brush message per touched cell, coalesced so that a cell
 * is painted at most once between flushes; flush order follows first touch.
 * The wind tool turns a drag vector into a wind control clamped to the
 * server's [-2, 2] velocity range.
 */

import type { Control } from "./protocol.js";

export type Tool =
  | { kind: "brush"; element: number; radius: number }
  | { kind: "eraser"; radius: number }
  | { kind: "wind"; strength: number };

export interface CellPoint {
  x: number;
  y: number;
}

export const MIN_BRUSH_RADIUS = 1;
export const MAX_BRUSH_RADIUS = 8;
export const MAX_WIND_SPEED = 2;

/** Map a pointer position in canvas pixels to a grid cell, or null when the
 * pointer is outside the canvas. */
export function pointerToCell(
  px: number,
  py: number,
  canvasWidth: number,
  canvasHeight: number,
  gridWidth: number,
  gridHeight: number,
): CellPoint | null {
  if (px < 0 || py < 0 || px >= canvasWidth || py >= canvasHeight) return null;
  return {
    x: Math.floor((px / canvasWidth) * gridWidth),
    y: Math.floor((py / canvasHeight) * gridHeight),
  };
}

export function clampRadius(radius: number): number {
  return Math.min(MAX_BRUSH_RADIUS, Math.max(MIN_BRUSH_RADIUS, Math.round(radius)));
}

/** Collects pointer events between animation frames. */
export class ControlCoalescer {
  private brushes = new Map<string, Control>();
  private wind: Control | null = null;

  addBrush(cell: CellPoint, element: number, radius: number): void {
    const key = `${cell.x},${cell.y}`;
    if (!this.brushes.has(key)) {
      this.brushes.set(key, {
        op: "brush",
        x: cell.x,
        y: cell.y,
        radius: clampRadius(radius),
        element,
      });
    }
  }

  /** Wind is latest-wins within a frame: only the final drag vector counts. */
  setWind(cell: CellPoint, vx: number, vy: number): void {
    const clamp = (v: number) =>
      Math.max(-MAX_WIND_SPEED, Math.min(MAX_WIND_SPEED, v));
    this.wind = { op: "wind", x: cell.x, y: cell.y, vx: clamp(vx), vy: clamp(vy) };
  }

  get pendingCount(): number {
    return this.brushes.size + (this.wind ? 1 : 0);
  }

  /** Drain everything collected since the last flush, in arrival order. */
  flush(): Control[] {
    const out = [...this.brushes.values()];
    if (this.wind) out.push(this.wind);
    this.brushes.clear();
    this.wind = null;
    return out;
  }
}

/** Convert a wind-tool drag into the velocity it should impart. */
export function windFromDrag(
  start: CellPoint,
  end: CellPoint,
  strength: number,
): { vx: number; vy: number } {
  const dx = end.x - start.x;
  const dy = end.y - start.y;
  const len = Math.hypot(dx, dy);
  if (len === 0) return { vx: 0, vy: 0 };
  return {
    vx: (dx / len) * strength,
    vy: (dy / len) * strength,
  };
}
