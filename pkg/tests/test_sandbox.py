"""Websocket sandbox service: frames, controls, tick-boundary semantics."""

import asyncio
import json

import numpy as np
import pytest
import websockets.asyncio.client as wsclient

from sandsim.elements import ElementId, make_world
from sandsim.sandbox import (
    SandboxServer,
    decode_frame,
    encode_frame,
    serve_sandbox,
)

import itertools

_ports = itertools.count(8941)
PORT = 0  # set per server start


def run_async(coro):
    return asyncio.run(coro)


async def _with_server(test_body, **server_kwargs):
    global PORT
    PORT = next(_ports)
    ready = asyncio.Event()
    task = asyncio.create_task(
        serve_sandbox(port=PORT, ready=ready, tick_rate=120, **server_kwargs))
    await asyncio.wait_for(ready.wait(), 5)
    try:
        await asyncio.wait_for(test_body(), 30)
    finally:
        task.cancel()
        try:
            await task
        except (asyncio.CancelledError, Exception):
            pass


async def _frames_until(ws, pred, limit=100):
    for _ in range(limit):
        frame = decode_frame(await ws.recv())
        if pred(frame):
            return frame
    raise AssertionError("condition not reached within frame limit")


class TestFrameCodec:
    def test_roundtrip(self):
        w = make_world(1, 16, 24)
        w.elem[0, 3, 4:9] = int(ElementId.SAND)
        w.tick = 99
        tick, elem, vel = decode_frame(encode_frame(w))
        assert tick == 99
        assert (elem == w.elem[0]).all()
        assert vel is None

    def test_velocity_overlay(self):
        w = make_world(1, 8, 8)
        w.vel[0, 2, 2] = (1.0, -0.5)
        _, _, vel = decode_frame(encode_frame(w, include_velocity=True))
        assert vel.shape == (8, 8, 2)
        assert vel[2, 2, 0] == pytest.approx(1.0, abs=1 / 16)
        assert vel[2, 2, 1] == pytest.approx(-0.5, abs=1 / 16)

    def test_frame_is_single_tick(self):
        # a frame never mixes ticks: encode is a pure snapshot
        w = make_world(1, 8, 8)
        a = encode_frame(w)
        w2 = w.copy()
        w2.tick = 5
        assert decode_frame(a)[0] == 0
        assert decode_frame(encode_frame(w2))[0] == 5


class TestControls:
    def test_brush_and_validation(self):
        server = SandboxServer()
        server.apply_control({"op": "brush", "x": 10, "y": 10, "radius": 3,
                              "element": int(ElementId.SAND)})
        assert (server.world.elem[0] == int(ElementId.SAND)).sum() > 0
        from sandsim.sandbox import ProtocolViolation
        with pytest.raises(ProtocolViolation):
            server.apply_control({"op": "brush", "x": 1, "y": 1, "radius": 99,
                                  "element": 2})
        with pytest.raises(ProtocolViolation):
            server.apply_control({"op": "speed", "ticks_per_second": 1e9})
        with pytest.raises(ProtocolViolation):
            server.apply_control({"op": "reset", "params": {"evil": 1}})

    def test_pause_is_idempotent(self):
        server = SandboxServer()
        server.apply_control({"op": "pause"})
        server.apply_control({"op": "pause"})
        assert server.paused
        tick = server.world.tick
        server.tick_once()
        assert server.world.tick == tick

    def test_reset_with_dimensions(self):
        server = SandboxServer()
        server.apply_control({"op": "reset", "params": {"height": 32,
                                                        "width": 48,
                                                        "seed": 2}})
        assert server.world.elem.shape == (1, 32, 48)


class TestEndToEnd:
    def test_draw_sand_and_watch_it_fall(self):
        async def body():
            async with wsclient.connect(f"ws://127.0.0.1:{PORT}") as ws:
                await ws.recv()
                await ws.send(json.dumps({
                    "op": "brush", "x": 32, "y": 8, "radius": 3,
                    "element": int(ElementId.SAND)}))
                first = await _frames_until(
                    ws, lambda f: (f[1] == int(ElementId.SAND)).any())

                def centroid(elem):
                    return float(np.argwhere(elem == 2)[:, 0].mean())

                ys = [centroid(first[1])]
                for _ in range(3):
                    _, elem, _ = decode_frame(await ws.recv())
                    ys.append(centroid(elem))
                assert ys == sorted(ys) and ys[-1] > ys[0]  # falls monotonically
        run_async(_with_server(body))

    def test_pause_step_advances_exactly_one_tick(self):
        async def body():
            async with wsclient.connect(f"ws://127.0.0.1:{PORT}") as ws:
                await ws.recv()
                await ws.send(json.dumps({"op": "pause"}))
                seen = []

                async def settled():
                    while True:
                        t, _, _ = decode_frame(await ws.recv())
                        seen.append(t)
                        if len(seen) >= 2 and seen[-1] == seen[-2]:
                            return t

                t0 = await asyncio.wait_for(settled(), 10)
                await ws.send(json.dumps({"op": "step"}))
                t1 = (await _frames_until(ws, lambda f: f[0] != t0))[0]
                assert t1 == t0 + 1
                for _ in range(5):  # stays put afterwards
                    t, _, _ = decode_frame(await ws.recv())
                    assert t == t1
        run_async(_with_server(body))

    def test_dual_client_edits_both_appear(self):
        async def body():
            url = f"ws://127.0.0.1:{PORT}"
            async with wsclient.connect(url) as a, wsclient.connect(url) as b:
                await a.recv(), await b.recv()
                await a.send(json.dumps({"op": "brush", "x": 10, "y": 50,
                                         "radius": 2,
                                         "element": int(ElementId.WALL)}))
                await b.send(json.dumps({"op": "brush", "x": 50, "y": 50,
                                         "radius": 2,
                                         "element": int(ElementId.ICE)}))

                def both(frame):
                    _, elem, _ = frame
                    return (elem == int(ElementId.WALL)).any() and \
                        (elem == int(ElementId.ICE)).any()

                fa = await _frames_until(a, both)
                fb = await _frames_until(b, lambda f: f[0] >= fa[0] and both(f))
                assert both(fa) and both(fb)
        run_async(_with_server(body))

    def test_protocol_violation_disconnects_only_offender(self):
        async def body():
            url = f"ws://127.0.0.1:{PORT}"
            async with wsclient.connect(url) as good:
                await good.recv()
                async with wsclient.connect(url) as bad:
                    await bad.recv()
                    await bad.send("this is not json")
                    with pytest.raises(Exception):
                        while True:
                            await asyncio.wait_for(bad.recv(), 5)
                # the good client keeps receiving advancing frames
                t0 = decode_frame(await good.recv())[0]
                await _frames_until(good, lambda f: f[0] > t0)
        run_async(_with_server(body))
