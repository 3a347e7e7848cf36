"""Interactive sandbox server: binary frames out, JSON controls in.

Frame layout (little-endian):

    tick    u64
    height  u16
    width   u16
    flags   u8    bit0: int8 velocity overlay follows the RLE block
    rle_len u32   byte length of the RLE block
    rle     rle_len bytes of (count u16, element u8) runs, row-major
    [vel]   H*W*2 int8, velocity * 16 clamped to [-127, 127]

Text messages are JSON controls; each is queued and applied at the next
tick boundary, in arrival order:

    {"op": "brush", "x": 10, "y": 20, "radius": 3, "element": 2}
    {"op": "wind", "x": 10, "y": 20, "vx": 2.0, "vy": 0.0}
    {"op": "pause"} {"op": "resume"} {"op": "step"}
    {"op": "reset", "params": {"max_lines": 2, "height": 64, "width": 64}}
    {"op": "speed", "ticks_per_second": 10}

While paused the server keeps broadcasting the current frame so new clients
see the world immediately; "step" advances exactly one tick per message.
A malformed control disconnects only the offending client.
"""

import asyncio
import contextlib
import dataclasses
import json
import struct

import numpy as np

from .elements import ElementId, N_ELEMENTS, make_world
from .engine import RuleConfig, add_wind, step
from .procgen import PcgParams, gen_start_state

__all__ = ["SandboxServer", "encode_frame", "decode_frame", "serve_sandbox"]

_FRAME_HEAD = struct.Struct("<QHHBI")
FLAG_VELOCITY = 0x01
MAX_BRUSH_RADIUS = 8
DEFAULT_TPS = 30.0
_VEL_SCALE = 16.0


def _rle_bytes(elem: np.ndarray) -> bytes:
    flat = elem.ravel()
    edges = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [len(flat)]))
    out = bytearray()
    for s, e in zip(starts, ends):
        length, value = int(e - s), int(flat[s])
        while length > 0:
            chunk = min(length, 0xFFFF)
            out += struct.pack("<HB", chunk, value)
            length -= chunk
    return bytes(out)


def encode_frame(world, slot: int = 0, include_velocity: bool = False) -> bytes:
    elem = world.elem[slot]
    h, w = elem.shape
    rle = _rle_bytes(elem)
    flags = FLAG_VELOCITY if include_velocity else 0
    out = bytearray(_FRAME_HEAD.pack(world.tick, h, w, flags, len(rle)))
    out += rle
    if include_velocity:
        q = np.clip(np.rint(world.vel[slot] * _VEL_SCALE), -127, 127)
        out += q.astype("<i1").tobytes()
    return bytes(out)


def decode_frame(data: bytes):
    """Inverse of encode_frame: (tick, elements (H, W), velocity or None)."""
    tick, h, w, flags, rle_len = _FRAME_HEAD.unpack_from(data, 0)
    offset = _FRAME_HEAD.size
    elem = np.empty(h * w, dtype=np.uint8)
    pos = 0
    end = offset + rle_len
    while offset < end:
        count, value = struct.unpack_from("<HB", data, offset)
        offset += 3
        elem[pos : pos + count] = value
        pos += count
    if pos != h * w:
        raise ValueError(f"frame RLE covers {pos} of {h * w} cells")
    vel = None
    if flags & FLAG_VELOCITY:
        vel = np.frombuffer(data, dtype="<i1", count=h * w * 2,
                            offset=offset).reshape(h, w, 2) / _VEL_SCALE
    return tick, elem.reshape(h, w), vel


class ProtocolViolation(Exception):
    pass


class SandboxServer:
    """Single shared world; every connected client sees the same frames."""

    def __init__(self, params: PcgParams | None = None,
                 config: RuleConfig | None = None,
                 tick_rate: float = DEFAULT_TPS,
                 include_velocity: bool = False):
        self.config = config if config is not None else RuleConfig()
        self.tick_rate = tick_rate
        self.include_velocity = include_velocity
        self.paused = False
        self.pending_steps = 0
        self.controls: asyncio.Queue = asyncio.Queue()
        self.clients: set = set()
        self.frames_sent = 0
        if params is not None:
            self.world = gen_start_state(params)
        else:
            self.world = make_world(1, 64, 64)

    # -- controls ----------------------------------------------------------

    def apply_control(self, msg: dict) -> None:
        op = msg.get("op")
        if op == "brush":
            self._brush(msg)
        elif op == "wind":
            x, y = int(msg["x"]), int(msg["y"])
            self.world = add_wind(self.world, 0, x, y,
                                  float(msg["vx"]), float(msg["vy"]))
        elif op == "pause":
            self.paused = True
        elif op == "resume":
            self.paused = False
            self.pending_steps = 0
        elif op == "step":
            self.pending_steps += 1
        elif op == "speed":
            tps = float(msg["ticks_per_second"])
            if not 0.1 <= tps <= 240:
                raise ProtocolViolation(f"speed {tps} out of range")
            self.tick_rate = tps
        elif op == "reset":
            raw = dict(msg.get("params", {}))
            known = {f.name for f in dataclasses.fields(PcgParams)}
            bad = set(raw) - known
            if bad:
                raise ProtocolViolation(f"unknown reset params {sorted(bad)}")
            for key in ("thickness_range", "radius_range", "element_palette"):
                if isinstance(raw.get(key), list):
                    raw[key] = tuple(raw[key])
            self.world = gen_start_state(PcgParams(**raw))
        else:
            raise ProtocolViolation(f"unknown op {op!r}")

    def _brush(self, msg: dict) -> None:
        x, y, radius = int(msg["x"]), int(msg["y"]), int(msg["radius"])
        element = int(msg["element"])
        if not 1 <= radius <= MAX_BRUSH_RADIUS:
            raise ProtocolViolation(f"brush radius {radius} out of range")
        if not 0 <= element < N_ELEMENTS:
            raise ProtocolViolation(f"unknown element {element}")
        h, w = self.world.height, self.world.width
        yy, xx = np.mgrid[0:h, 0:w]
        disc = (xx - x) ** 2 + (yy - y) ** 2 <= radius ** 2
        world = self.world.copy()
        world.elem[0][disc] = element
        world.flow[0][disc] = 0
        world.cloner[0][disc] = -1
        if element == int(ElementId.EMPTY):
            world.vel[0][disc] = 0.0
        self.world = world

    def tick_once(self) -> None:
        """Drain queued controls, then advance if running (or step-pending)."""
        while True:
            try:
                client, msg = self.controls.get_nowait()
            except asyncio.QueueEmpty:
                break
            try:
                self.apply_control(msg)
            except (ProtocolViolation, KeyError, TypeError, ValueError) as exc:
                asyncio.ensure_future(_drop(client, str(exc)))
        if not self.paused or self.pending_steps > 0:
            self.world = step(self.world, self.config)
            if self.pending_steps > 0:
                self.pending_steps -= 1

    # -- networking --------------------------------------------------------

    async def handle_client(self, ws) -> None:
        self.clients.add(ws)
        try:
            await ws.send(encode_frame(self.world, 0, self.include_velocity))
            async for raw in ws:
                if isinstance(raw, bytes):
                    await _drop(ws, "clients must send text controls")
                    return
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("control must be a JSON object")
                except ValueError as exc:
                    await _drop(ws, f"invalid control: {exc}")
                    return
                await self.controls.put((ws, msg))
        finally:
            self.clients.discard(ws)

    async def run(self) -> None:
        while True:
            started = asyncio.get_event_loop().time()
            self.tick_once()
            frame = encode_frame(self.world, 0, self.include_velocity)
            for ws in list(self.clients):
                try:
                    await ws.send(frame)
                except Exception:
                    self.clients.discard(ws)
            self.frames_sent += 1
            elapsed = asyncio.get_event_loop().time() - started
            await asyncio.sleep(max(0.0, 1.0 / self.tick_rate - elapsed))


async def _drop(ws, reason: str) -> None:
    with contextlib.suppress(Exception):
        await ws.close(code=1002, reason=reason[:120])


async def serve_sandbox(host: str = "127.0.0.1", port: int = 8765,
                        params: PcgParams | None = None,
                        config: RuleConfig | None = None,
                        tick_rate: float = DEFAULT_TPS,
                        include_velocity: bool = False,
                        ready: "asyncio.Event | None" = None) -> None:
    """Run the sandbox until cancelled."""
    import websockets.asyncio.server

    server = SandboxServer(params=params, config=config, tick_rate=tick_rate,
                           include_velocity=include_velocity)
    async with websockets.asyncio.server.serve(server.handle_client, host, port):
        if ready is not None:
            ready.set()
        await server.run()
