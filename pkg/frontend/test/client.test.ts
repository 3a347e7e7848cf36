import { describe, expect, it } from "vitest";

import { SandboxClient } from "../src/client.js";
import { encodeRawFrame, type Control } from "../src/protocol.js";

class FakeSocket {
  sent: string[] = [];
  closed = false;
  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.closed = true;
  }
}

function frameBytes(tick: number): Uint8Array {
  return encodeRawFrame(tick, 4, 4, new Uint8Array(16));
}

describe("SandboxClient", () => {
  it("keeps the latest frame and notifies onFrame", () => {
    const client = new SandboxClient();
    const ticks: number[] = [];
    client.onFrame = (frame) => ticks.push(frame.tick);
    client.receive(frameBytes(1));
    client.receive(frameBytes(2));
    expect(ticks).toEqual([1, 2]);
    expect(client.state.frame?.tick).toBe(2);
    expect(client.state.decodeErrors).toBe(0);
  });

  it("drops malformed frames, counts them, and keeps the last good one", () => {
    const client = new SandboxClient();
    client.receive(frameBytes(7));
    client.receive(new Uint8Array([1, 2, 3]));
    const bad = frameBytes(8);
    bad[19] = 200; // invalid element id
    client.receive(bad);
    expect(client.state.decodeErrors).toBe(2);
    expect(client.state.frame?.tick).toBe(7);
  });

  it("sends controls only while attached", () => {
    const client = new SandboxClient();
    const socket = new FakeSocket();
    client.send({ op: "pause" }); // detached: silently disabled
    expect(socket.sent).toEqual([]);
    client.attach(socket);
    client.send({ op: "pause" });
    client.send({ op: "speed", ticks_per_second: 60 });
    expect(socket.sent.map((s) => JSON.parse(s).op)).toEqual(["pause", "speed"]);
    expect(client.state.paused).toBe(true);
    expect(client.state.ticksPerSecond).toBe(60);
    client.send({ op: "resume" });
    expect(client.state.paused).toBe(false);
    client.detach();
    client.send({ op: "step" });
    expect(socket.sent.length).toBe(3);
    expect(client.state.connected).toBe(false);
  });

  it("flushes coalesced pointer controls to the socket", () => {
    const client = new SandboxClient();
    const socket = new FakeSocket();
    client.attach(socket);
    client.coalescer.addBrush({ x: 1, y: 1 }, 2, 3);
    client.coalescer.addBrush({ x: 1, y: 1 }, 2, 3);
    client.coalescer.addBrush({ x: 2, y: 1 }, 2, 3);
    expect(client.flushControls()).toBe(2);
    const ops = socket.sent.map((s) => JSON.parse(s) as Control);
    expect(ops.every((c) => c.op === "brush")).toBe(true);
    expect(client.flushControls()).toBe(0);
  });
});
