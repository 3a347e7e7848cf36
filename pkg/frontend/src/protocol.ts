/**
 * Wire protocol shared with the sandbox server.
 *
 * Binary frames (little-endian):
 *   tick u64 | height u16 | width u16 | flags u8 | rleLen u32 |
 *   rleLen bytes of (count u16, element u8) runs |
 *   optional H*W*2 int8 velocity overlay (flags bit 0), scaled by 16.
 *
 * Controls are JSON text messages sent to the server.
 */

export const FLAG_VELOCITY = 0x01;
export const N_ELEMENTS = 14;
export const VELOCITY_SCALE = 16;
const HEADER_BYTES = 8 + 2 + 2 + 1 + 4;

export interface Frame {
  tick: number;
  height: number;
  width: number;
  /** row-major element ids, one byte per cell */
  elements: Uint8Array;
  /** per-cell (vx, vy) pairs, row-major, or null when absent */
  velocity: Float32Array | null;
}

export class FrameDecodeError extends Error {}

export function decodeFrame(data: ArrayBuffer | Uint8Array): Frame {
  const bytes = data instanceof Uint8Array ? data : new Uint8Array(data);
  if (bytes.byteLength < HEADER_BYTES) {
    throw new FrameDecodeError(`frame too short: ${bytes.byteLength} bytes`);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const tick = Number(view.getBigUint64(0, true));
  const height = view.getUint16(8, true);
  const width = view.getUint16(10, true);
  const flags = view.getUint8(12);
  const rleLen = view.getUint32(13, true);
  const cells = height * width;
  if (HEADER_BYTES + rleLen > bytes.byteLength) {
    throw new FrameDecodeError("truncated RLE block");
  }

  const elements = new Uint8Array(cells);
  let offset = HEADER_BYTES;
  const end = HEADER_BYTES + rleLen;
  let pos = 0;
  while (offset < end) {
    if (offset + 3 > end) throw new FrameDecodeError("dangling RLE pair");
    const count = view.getUint16(offset, true);
    const value = view.getUint8(offset + 2);
    offset += 3;
    if (value >= N_ELEMENTS) {
      throw new FrameDecodeError(`invalid element id ${value}`);
    }
    if (pos + count > cells) throw new FrameDecodeError("RLE overruns grid");
    elements.fill(value, pos, pos + count);
    pos += count;
  }
  if (pos !== cells) {
    throw new FrameDecodeError(`RLE covers ${pos} of ${cells} cells`);
  }

  let velocity: Float32Array | null = null;
  if (flags & FLAG_VELOCITY) {
    const need = cells * 2;
    if (offset + need > bytes.byteLength) {
      throw new FrameDecodeError("truncated velocity overlay");
    }
    velocity = new Float32Array(need);
    const raw = new Int8Array(bytes.buffer, bytes.byteOffset + offset, need);
    for (let i = 0; i < need; i++) velocity[i] = raw[i] / VELOCITY_SCALE;
  }
  return { tick, height, width, elements, velocity };
}

/** Encode a raw (non-RLE) element grid into frame bytes; used in tests to
 * prove that RLE and raw payloads render identically. */
export function encodeRawFrame(
  tick: number,
  height: number,
  width: number,
  elements: Uint8Array,
): Uint8Array {
  // a raw grid is just RLE with unit runs
  const rleLen = elements.length * 3;
  const out = new Uint8Array(HEADER_BYTES + rleLen);
  const view = new DataView(out.buffer);
  view.setBigUint64(0, BigInt(tick), true);
  view.setUint16(8, height, true);
  view.setUint16(10, width, true);
  view.setUint8(12, 0);
  view.setUint32(13, rleLen, true);
  let offset = HEADER_BYTES;
  for (const value of elements) {
    view.setUint16(offset, 1, true);
    view.setUint8(offset + 2, value);
    offset += 3;
  }
  return out;
}

export type Control =
  | { op: "brush"; x: number; y: number; radius: number; element: number }
  | { op: "wind"; x: number; y: number; vx: number; vy: number }
  | { op: "pause" }
  | { op: "resume" }
  | { op: "step" }
  | { op: "speed"; ticks_per_second: number }
  | { op: "reset"; params: Record<string, unknown> };

export function encodeControl(control: Control): string {
  return JSON.stringify(control);
}
