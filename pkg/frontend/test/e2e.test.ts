/**
 * End-to-end tests against the real sandbox server: spawn the Python CLI,
 * connect over websockets, and verify edits, physics, and pause/step
 * through the same decode path the browser UI uses.
 */
import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { WebSocket } from "ws";
import { afterEach, describe, expect, it } from "vitest";

import { decodeFrame, encodeControl, type Control, type Frame } from "../src/protocol.js";

const SAND = 2;
const WALL = 1;
let nextPort = 8873;
const cleanups: Array<() => void> = [];

afterEach(() => {
  while (cleanups.length) cleanups.pop()!();
});

function emptyWorldConfig(): string {
  const dir = mkdtempSync(join(tmpdir(), "sandbox-e2e-"));
  const path = join(dir, "empty.cfg");
  writeFileSync(
    path,
    [
      "pcg.max_lines = 0",
      "pcg.max_circles = 0",
      "pcg.max_squares = 0",
      "pcg.height = 48",
      "pcg.width = 48",
      "",
    ].join("\n"),
  );
  return path;
}

function startServer(port: number): ChildProcess {
  const proc = spawn(
    "python3",
    [
      "-m", "sandsim.cli", "sandbox-serve",
      "--host", "127.0.0.1",
      "--port", String(port),
      "--tick-rate", "60",
      "--config", emptyWorldConfig(),
    ],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  cleanups.push(() => proc.kill("SIGKILL"));
  return proc;
}

class TestClient {
  private ws!: WebSocket;
  private frames: Frame[] = [];
  private waiters: Array<() => void> = [];

  async connect(port: number): Promise<void> {
    const deadline = Date.now() + 15_000;
    for (;;) {
      try {
        await new Promise<void>((resolve, reject) => {
          const ws = new WebSocket(`ws://127.0.0.1:${port}`);
          ws.binaryType = "nodebuffer";
          ws.once("open", () => {
            this.ws = ws;
            resolve();
          });
          ws.once("error", reject);
        });
        break;
      } catch (err) {
        if (Date.now() > deadline) throw err;
        await new Promise((r) => setTimeout(r, 200));
      }
    }
    this.ws.on("message", (data: Buffer, isBinary: boolean) => {
      if (!isBinary) return;
      this.frames.push(decodeFrame(new Uint8Array(data)));
      for (const wake of this.waiters.splice(0)) wake();
    });
    cleanups.push(() => this.ws.close());
  }

  send(control: Control): void {
    this.ws.send(encodeControl(control));
  }

  /** Resolve with the first not-yet-consumed frame matching the predicate. */
  async waitFor(
    predicate: (frame: Frame) => boolean,
    timeoutMs = 10_000,
  ): Promise<Frame> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      while (this.frames.length) {
        const frame = this.frames.shift()!;
        if (predicate(frame)) return frame;
      }
      if (Date.now() > deadline) throw new Error("timed out waiting for frame");
      await new Promise<void>((resolve) => {
        this.waiters.push(resolve);
        setTimeout(resolve, 100);
      });
    }
  }

  nextFrame(): Promise<Frame> {
    return this.waitFor(() => true);
  }

  closed(timeoutMs = 10_000): Promise<void> {
    return new Promise((resolve, reject) => {
      if (this.ws.readyState === WebSocket.CLOSED) return resolve();
      this.ws.once("close", () => resolve());
      setTimeout(() => reject(new Error("socket not closed")), timeoutMs);
    });
  }
}

function count(frame: Frame, element: number): number {
  let n = 0;
  for (const value of frame.elements) if (value === element) n++;
  return n;
}

function lowestRow(frame: Frame, element: number): number {
  let row = -1;
  for (let i = 0; i < frame.elements.length; i++) {
    if (frame.elements[i] === element) row = Math.floor(i / frame.width);
  }
  return row;
}

describe("sandbox server end to end", () => {
  it("starts empty and shows a drawn sand disc falling over consecutive frames", async () => {
    const port = nextPort++;
    startServer(port);
    const client = new TestClient();
    await client.connect(port);

    const first = await client.nextFrame();
    expect(first.height).toBe(48);
    expect(first.width).toBe(48);
    expect(count(first, 0)).toBe(48 * 48); // all empty before any edits

    client.send({ op: "brush", x: 24, y: 6, radius: 3, element: SAND });
    const withSand = await client.waitFor((f) => count(f, SAND) > 0);
    const sandCells = count(withSand, SAND);
    expect(sandCells).toBeGreaterThan(20); // a radius-3 disc, not a dot

    // the leading edge advances one row per tick while airborne
    const rows = [lowestRow(withSand, SAND)];
    let prevTick = withSand.tick;
    while (rows.length < 4) {
      const frame = await client.waitFor((f) => f.tick > prevTick);
      prevTick = frame.tick;
      rows.push(lowestRow(frame, SAND));
      expect(count(frame, SAND)).toBe(sandCells); // nothing lost in transit
    }
    expect(rows[1]).toBeGreaterThan(rows[0]);
    expect(rows[2]).toBeGreaterThan(rows[1]);
    expect(rows[3]).toBeGreaterThan(rows[2]);
  }, 30_000);

  it("pause freezes the tick and step advances it exactly once", async () => {
    const port = nextPort++;
    startServer(port);
    const client = new TestClient();
    await client.connect(port);
    await client.nextFrame();

    client.send({ op: "pause" });
    // wait until broadcasts repeat the same tick: the pause has landed
    let frame = await client.nextFrame();
    let repeats = 0;
    let pausedTick = frame.tick;
    while (repeats < 3) {
      frame = await client.nextFrame();
      if (frame.tick === pausedTick) {
        repeats += 1;
      } else {
        pausedTick = frame.tick;
        repeats = 0;
      }
    }

    client.send({ op: "step" });
    const stepped = await client.waitFor((f) => f.tick !== pausedTick);
    expect(stepped.tick).toBe(pausedTick + 1);
    for (let i = 0; i < 3; i++) {
      expect((await client.nextFrame()).tick).toBe(pausedTick + 1); // still paused
    }

    client.send({ op: "resume" });
    const running = await client.waitFor((f) => f.tick > pausedTick + 1);
    expect(running.tick).toBeGreaterThan(pausedTick + 1);
  }, 30_000);

  it("edits from two clients are visible to both", async () => {
    const port = nextPort++;
    startServer(port);
    const alpha = new TestClient();
    const beta = new TestClient();
    await alpha.connect(port);
    await beta.connect(port);
    await alpha.nextFrame();
    await beta.nextFrame();

    alpha.send({ op: "pause" }); // keep the scene static for comparison
    alpha.send({ op: "brush", x: 10, y: 40, radius: 2, element: SAND });
    beta.send({ op: "brush", x: 38, y: 40, radius: 2, element: WALL });

    const both = (f: Frame) => count(f, SAND) > 0 && count(f, WALL) > 0;
    const seenByAlpha = await alpha.waitFor(both);
    const seenByBeta = await beta.waitFor(both);
    expect(seenByAlpha.elements).toEqual(seenByBeta.elements);
    expect(count(seenByAlpha, SAND)).toBe(13); // radius-2 disc
    expect(count(seenByAlpha, WALL)).toBe(13);
  }, 30_000);

  it("closes a client that sends an oversized brush, leaving others connected", async () => {
    const port = nextPort++;
    startServer(port);
    const good = new TestClient();
    const bad = new TestClient();
    await good.connect(port);
    await bad.connect(port);

    bad.send({ op: "brush", x: 5, y: 5, radius: 99, element: SAND });
    await bad.closed();

    // the well-behaved client still works after the other was dropped
    good.send({ op: "brush", x: 20, y: 20, radius: 2, element: WALL });
    const frame = await good.waitFor((f) => count(f, WALL) > 0);
    expect(count(frame, SAND)).toBe(0); // the rejected edit never applied
  }, 30_000);
});
