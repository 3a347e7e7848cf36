/** Pure frame-to-pixels rendering; canvas blitting stays in main.ts. */

import type { Frame } from "./protocol.js";
import { PALETTE } from "./palette.js";

/** One cell -> one RGBA pixel, row-major. Velocity (when present) is shown
 * as a brightness boost proportional to speed. */
export function renderFrame(
  frame: Frame,
  showVelocity = false,
): Uint8ClampedArray<ArrayBuffer> {
  const { height, width, elements, velocity } = frame;
  const out = new Uint8ClampedArray(new ArrayBuffer(height * width * 4));
  for (let i = 0; i < elements.length; i++) {
    const color = PALETTE[elements[i]];
    let boost = 0;
    if (showVelocity && velocity) {
      const vx = velocity[i * 2];
      const vy = velocity[i * 2 + 1];
      boost = Math.min(96, Math.hypot(vx, vy) * 24);
    }
    const o = i * 4;
    out[o] = color.r + boost;
    out[o + 1] = color.g + boost;
    out[o + 2] = color.b + boost;
    out[o + 3] = 255;
  }
  return out;
}
