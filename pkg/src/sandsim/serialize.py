"""Bit-exact world persistence.

File layout (all little-endian):

    magic   4s   "PWLD"
    version u16  = 1
    flags   u16  bit0: element-only RLE payload
                 bit1: random-stream trailer present
    B,H,W,N u32 x 4

Full payload: per slot, the (H, W, 20) channel tensor as float32, row-major,
channel-last. RLE payload: per slot, a u32 pair count followed by
(count u16, element u8) runs over the row-major element grid.

The trailer (one u64 stream id per slot, then the u64 tick counter) makes a
loaded world resume the exact random sequence of the saved one; without it,
a full-mode load is still channel-exact but starts a fresh stream.
"""

import struct

import numpy as np

from .elements import (
    CLONER_UNSET,
    DENSITY,
    IS_GRAVITY,
    N_CHANNELS,
    N_ELEMENTS,
    World,
    make_world,
    world_channels,
)

__all__ = ["ParseError", "save_world", "load_world", "rle_encode", "rle_decode"]

MAGIC = b"PWLD"
VERSION = 1
FLAG_RLE = 0x0001
FLAG_STREAMS = 0x0002

_HEADER = struct.Struct("<4sHHIIII")


class ParseError(ValueError):
    """Malformed world file; `offset` is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def rle_encode(elem: np.ndarray) -> bytes:
    """Run-length encode one slot's flattened element grid."""
    flat = elem.ravel()
    # run boundaries
    edges = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [len(flat)]))
    out = bytearray()
    npairs = 0
    for s, e in zip(starts, ends):
        length = int(e - s)
        value = int(flat[s])
        while length > 0:
            chunk = min(length, 0xFFFF)
            out += struct.pack("<HB", chunk, value)
            length -= chunk
            npairs += 1
    return struct.pack("<I", npairs) + bytes(out)


def rle_decode(data: bytes, offset: int, n_cells: int) -> tuple[np.ndarray, int]:
    if offset + 4 > len(data):
        raise ParseError("truncated RLE pair count", offset)
    (npairs,) = struct.unpack_from("<I", data, offset)
    offset += 4
    out = np.empty(n_cells, dtype=np.uint8)
    pos = 0
    for _ in range(npairs):
        if offset + 3 > len(data):
            raise ParseError("truncated RLE pair", offset)
        count, value = struct.unpack_from("<HB", data, offset)
        offset += 3
        if value >= N_ELEMENTS:
            raise ParseError(f"invalid element id {value}", offset - 1)
        if pos + count > n_cells:
            raise ParseError("RLE overruns the grid", offset - 3)
        out[pos : pos + count] = value
        pos += count
    if pos != n_cells:
        raise ParseError(f"RLE covers {pos} of {n_cells} cells", offset)
    return out, offset


def save_world(world: World, mode: str = "full") -> bytes:
    """Serialize a world; `mode` is "full" (bitwise) or "rle" (element-only)."""
    if mode not in ("full", "rle"):
        raise ValueError(f"unknown mode {mode!r}")
    flags = FLAG_STREAMS | (FLAG_RLE if mode == "rle" else 0)
    b, h, w = world.batch, world.height, world.width
    out = bytearray(_HEADER.pack(MAGIC, VERSION, flags, b, h, w, N_CHANNELS))
    if mode == "full":
        for slot in range(b):
            out += world_channels(world, slot).astype("<f4").tobytes()
    else:
        for slot in range(b):
            out += rle_encode(world.elem[slot])
    out += world.streams.astype("<u8").tobytes()
    out += struct.pack("<Q", world.tick)
    return bytes(out)


def load_world(data: bytes) -> World:
    if len(data) < _HEADER.size:
        raise ParseError("truncated header", len(data))
    magic, version, flags, b, h, w, n = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise ParseError(f"unsupported version {version}", 4)
    if b < 1 or h < 1 or w < 1:
        raise ParseError("degenerate dimensions", 8)
    offset = _HEADER.size
    world = make_world(b, h, w)
    if flags & FLAG_RLE:
        for slot in range(b):
            elem, offset = rle_decode(data, offset, h * w)
            world.elem[slot] = elem.reshape(h, w)
    else:
        if n != N_CHANNELS:
            raise ParseError(f"full mode requires {N_CHANNELS} channels, got {n}", 20)
        span = h * w * N_CHANNELS * 4
        for slot in range(b):
            if offset + span > len(data):
                raise ParseError("truncated channel payload", offset)
            ch = np.frombuffer(data, dtype="<f4", count=h * w * N_CHANNELS,
                               offset=offset).reshape(h, w, N_CHANNELS)
            offset += span
            elem = np.argmax(ch[:, :, :N_ELEMENTS], axis=-1).astype(np.uint8)
            if not np.allclose(np.sort(ch[:, :, :N_ELEMENTS], axis=-1)[:, :, -1], 1.0):
                raise ParseError("channels 0-13 are not one-hot", offset - span)
            world.elem[slot] = elem
            world.flow[slot] = np.rint(ch[:, :, 16]).astype(np.int8)
            world.cloner[slot] = np.rint(ch[:, :, 17]).astype(np.int16)
            world.vel[slot, :, :, 0] = ch[:, :, 18]
            world.vel[slot, :, :, 1] = ch[:, :, 19]
    if flags & FLAG_STREAMS:
        span = b * 8 + 8
        if offset + span > len(data):
            raise ParseError("truncated stream trailer", offset)
        world.streams = np.frombuffer(data, dtype="<u8", count=b, offset=offset).copy()
        offset += b * 8
        (world.tick,) = struct.unpack_from("<Q", data, offset)
        offset += 8
    _sanity(world)
    return world


def _sanity(world: World) -> None:
    if world.elem.max(initial=0) >= N_ELEMENTS:
        raise ParseError("element id out of range", 0)
    # Derived channels are recomputed from the tables, so a decoded world is
    # consistent by construction; only free channels needed validation.
    assert DENSITY.shape[0] == N_ELEMENTS and IS_GRAVITY.shape[0] == N_ELEMENTS
    world.cloner[world.elem != 13] = CLONER_UNSET
    world.flow[~np.isin(world.elem, (3, 11, 12))] = 0
