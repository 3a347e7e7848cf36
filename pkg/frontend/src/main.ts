/** DOM wiring: canvas blitting, toolbar, pointer handling. */

import { SandboxClient } from "./client.js";
import {
  clampRadius,
  pointerToCell,
  windFromDrag,
  type CellPoint,
} from "./controls.js";
import { ELEMENT_NAMES } from "./palette.js";
import { renderFrame } from "./render.js";

const SERVER_URL =
  new URLSearchParams(location.search).get("server") ?? "ws://127.0.0.1:8765";

const canvas = document.getElementById("world") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const toolbar = document.getElementById("toolbar")!;
const status = document.getElementById("status")!;

const client = new SandboxClient();
let scratch: HTMLCanvasElement | null = null;
let dragStart: CellPoint | null = null;
let showVelocity = false;

client.onFrame = (frame) => {
  if (!scratch || scratch.width !== frame.width || scratch.height !== frame.height) {
    scratch = document.createElement("canvas");
    scratch.width = frame.width;
    scratch.height = frame.height;
  }
  const pixels = renderFrame(frame, showVelocity);
  scratch
    .getContext("2d")!
    .putImageData(new ImageData(pixels, frame.width, frame.height), 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(scratch, 0, 0, canvas.width, canvas.height);
  status.textContent = `tick ${frame.tick} | ${frame.width}x${frame.height}` +
    (client.state.paused ? " | paused" : "");
};

function cellAt(event: PointerEvent): CellPoint | null {
  const frame = client.state.frame;
  if (!frame) return null;
  const rect = canvas.getBoundingClientRect();
  return pointerToCell(
    event.clientX - rect.left,
    event.clientY - rect.top,
    rect.width,
    rect.height,
    frame.width,
    frame.height,
  );
}

function paint(cell: CellPoint): void {
  const tool = client.state.tool;
  if (tool.kind === "brush") {
    client.coalescer.addBrush(cell, tool.element, tool.radius);
  } else if (tool.kind === "eraser") {
    client.coalescer.addBrush(cell, 0, tool.radius);
  }
}

canvas.addEventListener("pointerdown", (event) => {
  const cell = cellAt(event);
  if (!cell) return;
  dragStart = cell;
  paint(cell);
});
canvas.addEventListener("pointermove", (event) => {
  if (!dragStart) return;
  const cell = cellAt(event);
  if (cell) paint(cell);
});
canvas.addEventListener("pointerup", (event) => {
  const cell = cellAt(event);
  const tool = client.state.tool;
  if (cell && dragStart && tool.kind === "wind") {
    const { vx, vy } = windFromDrag(dragStart, cell, tool.strength);
    client.coalescer.setWind(dragStart, vx, vy);
  }
  dragStart = null;
});

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.addEventListener("click", onClick);
  toolbar.appendChild(b);
  return b;
}

ELEMENT_NAMES.forEach((name, element) => {
  if (element === 0) return;
  button(name, () => {
    client.state.tool = { kind: "brush", element, radius: radiusInput.valueAsNumber };
  });
});
button("eraser", () => {
  client.state.tool = { kind: "eraser", radius: radiusInput.valueAsNumber };
});
button("wind", () => {
  client.state.tool = { kind: "wind", strength: 2 };
});
button("pause", () => client.send({ op: "pause" }));
button("resume", () => client.send({ op: "resume" }));
button("step", () => client.send({ op: "step" }));
button("velocity", () => {
  showVelocity = !showVelocity;
});
button("reset", () => {
  const raw = prompt(
    "reset params as JSON (e.g. {\"max_lines\": 3, \"seed\": 7})", "{}");
  if (raw === null) return;
  try {
    client.send({ op: "reset", params: JSON.parse(raw) });
  } catch {
    alert("invalid JSON");
  }
});

const radiusInput = document.createElement("input");
radiusInput.type = "range";
radiusInput.min = "1";
radiusInput.max = "8";
radiusInput.value = "3";
radiusInput.addEventListener("input", () => {
  const tool = client.state.tool;
  if (tool.kind === "brush" || tool.kind === "eraser") {
    tool.radius = clampRadius(radiusInput.valueAsNumber);
  }
});
toolbar.appendChild(radiusInput);

const speedInput = document.createElement("input");
speedInput.type = "range";
speedInput.min = "1";
speedInput.max = "120";
speedInput.value = "30";
speedInput.addEventListener("change", () => {
  client.send({ op: "speed", ticks_per_second: speedInput.valueAsNumber });
});
toolbar.appendChild(speedInput);

const socket = new WebSocket(SERVER_URL);
socket.binaryType = "arraybuffer";
socket.addEventListener("open", () => client.attach(socket));
socket.addEventListener("close", () => {
  client.detach();
  status.textContent = "disconnected";
});
socket.addEventListener("message", (event) => {
  if (typeof event.data !== "string") client.receive(event.data);
});

function pump(): void {
  client.flushControls();
  requestAnimationFrame(pump);
}
requestAnimationFrame(pump);
