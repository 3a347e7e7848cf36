/** Connection state machine, kept free of DOM and WebSocket specifics so it
 * can be driven by tests with a fake socket. The UI never mutates the grid
 * locally: every edit goes to the server and comes back as a frame. */

import { decodeFrame, encodeControl, type Control, type Frame } from "./protocol.js";
import { ControlCoalescer, type Tool } from "./controls.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
}

export interface ClientState {
  frame: Frame | null;
  tool: Tool;
  paused: boolean;
  ticksPerSecond: number;
  connected: boolean;
  decodeErrors: number;
}

export class SandboxClient {
  readonly state: ClientState = {
    frame: null,
    tool: { kind: "brush", element: 2, radius: 3 },
    paused: false,
    ticksPerSecond: 30,
    connected: false,
    decodeErrors: 0,
  };
  readonly coalescer = new ControlCoalescer();
  private socket: SocketLike | null = null;
  onFrame: (frame: Frame) => void = () => {};

  attach(socket: SocketLike): void {
    this.socket = socket;
    this.state.connected = true;
  }

  detach(): void {
    this.socket = null;
    this.state.connected = false;
  }

  /** Feed raw frame bytes from the wire; malformed frames are dropped and
   * counted, never rendered. */
  receive(data: ArrayBuffer | Uint8Array): void {
    try {
      const frame = decodeFrame(data);
      this.state.frame = frame; // latest frame wins
      this.onFrame(frame);
    } catch {
      this.state.decodeErrors += 1;
    }
  }

  send(control: Control): void {
    if (!this.socket) return; // disconnected: controls are disabled
    this.socket.send(encodeControl(control));
    if (control.op === "pause") this.state.paused = true;
    if (control.op === "resume") this.state.paused = false;
    if (control.op === "speed") {
      this.state.ticksPerSecond = control.ticks_per_second;
    }
  }

  /** Push all coalesced pointer controls for this animation frame. */
  flushControls(): number {
    const controls = this.coalescer.flush();
    for (const control of controls) this.send(control);
    return controls.length;
  }
}
