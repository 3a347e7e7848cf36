"""Element taxonomy, static properties, and the 20-channel world encoding.

The world is stored in a compact form (element ids plus the few free
per-cell scalars); the dense 20-channel float view used by observers and
serialization is derived on demand. Channels:

    0-13  one-hot element
    14    gravity flag
    15    density level, normalized by the maximum level (4)
    16    fluid flow-direction memory in {-1, 0, +1}
    17    cloner memory (stored element id, -1 when unset)
    18    velocity x  (+x is rightward)
    19    velocity y  (+y is downward)
"""

import hashlib
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .rng import slot_streams

__all__ = [
    "ElementId",
    "ElementProps",
    "World",
    "DomainError",
    "N_CHANNELS",
    "DENSITY_MAX",
    "element_props",
    "make_world",
    "set_element",
    "get_element",
    "world_channels",
    "world_digest",
    "channels_digest",
    "element_counts",
    "validate_world",
]

N_CHANNELS = 20
DENSITY_MAX = 4
CLONER_UNSET = -1

# Quantization applied to velocity channels before hashing.
_VEL_QUANTUM = 1e-6


class DomainError(ValueError):
    """Raised when an argument falls outside an operation's domain."""


class ElementId(IntEnum):
    EMPTY = 0
    WALL = 1
    SAND = 2
    WATER = 3
    GAS = 4
    WOOD = 5
    FIRE = 6
    PLANT = 7
    ICE = 8
    DUST = 9
    STONE = 10
    LAVA = 11
    ACID = 12
    CLONER = 13


@dataclass(frozen=True)
class ElementProps:
    is_gravity: bool
    density: int
    is_fluid: bool = False
    is_burnable: bool = False
    burn_chance: float = 0.0
    is_static_solid: bool = False


_PROPS: dict[ElementId, ElementProps] = {
    ElementId.EMPTY: ElementProps(is_gravity=True, density=1),
    ElementId.WALL: ElementProps(is_gravity=False, density=4, is_static_solid=True),
    ElementId.SAND: ElementProps(is_gravity=True, density=3),
    ElementId.WATER: ElementProps(is_gravity=True, density=2, is_fluid=True),
    ElementId.GAS: ElementProps(is_gravity=True, density=0),
    ElementId.WOOD: ElementProps(is_gravity=False, density=4, is_burnable=True, burn_chance=0.05),
    ElementId.FIRE: ElementProps(is_gravity=True, density=0),
    ElementId.PLANT: ElementProps(is_gravity=False, density=4, is_burnable=True, burn_chance=0.2),
    ElementId.ICE: ElementProps(is_gravity=False, density=4),
    ElementId.DUST: ElementProps(is_gravity=True, density=3, is_burnable=True, burn_chance=1.0),
    ElementId.STONE: ElementProps(is_gravity=True, density=4),
    ElementId.LAVA: ElementProps(is_gravity=True, density=2, is_fluid=True),
    ElementId.ACID: ElementProps(is_gravity=True, density=2, is_fluid=True),
    ElementId.CLONER: ElementProps(is_gravity=False, density=4),
}

# Lookup tables indexed by element id, used by the vectorized kernels.
N_ELEMENTS = len(ElementId)
DENSITY = np.array([_PROPS[ElementId(i)].density for i in range(N_ELEMENTS)], dtype=np.int8)
IS_GRAVITY = np.array([_PROPS[ElementId(i)].is_gravity for i in range(N_ELEMENTS)], dtype=bool)
IS_FLUID = np.array([_PROPS[ElementId(i)].is_fluid for i in range(N_ELEMENTS)], dtype=bool)
IS_BURNABLE = np.array([_PROPS[ElementId(i)].is_burnable for i in range(N_ELEMENTS)], dtype=bool)
BURN_CHANCE = np.array([_PROPS[ElementId(i)].burn_chance for i in range(N_ELEMENTS)], dtype=np.float64)


def element_props(elem: ElementId | int) -> ElementProps:
    """Static property record for one element."""
    try:
        return _PROPS[ElementId(elem)]
    except ValueError:
        raise DomainError(f"invalid element id: {elem!r}") from None


@dataclass
class World:
    """Batched grid state. A plain value: copy to share, no internal aliasing.

    Arrays are indexed [slot, y, x]; y grows downward.
    """

    elem: np.ndarray    # (B, H, W) uint8
    flow: np.ndarray    # (B, H, W) int8, fluid direction memory
    cloner: np.ndarray  # (B, H, W) int16, stored element id or -1
    vel: np.ndarray     # (B, H, W, 2) float32, (vx, vy)
    streams: np.ndarray  # (B,) uint64 per-slot random stream ids
    tick: int = 0

    @property
    def batch(self) -> int:
        return self.elem.shape[0]

    @property
    def height(self) -> int:
        return self.elem.shape[1]

    @property
    def width(self) -> int:
        return self.elem.shape[2]

    def copy(self) -> "World":
        return World(
            elem=self.elem.copy(),
            flow=self.flow.copy(),
            cloner=self.cloner.copy(),
            vel=self.vel.copy(),
            streams=self.streams.copy(),
            tick=self.tick,
        )

    def slot_view(self, slot: int) -> "World":
        """A single-slot copy keeping the slot's original random stream."""
        if not 0 <= slot < self.batch:
            raise DomainError(f"slot {slot} out of range for batch {self.batch}")
        return World(
            elem=self.elem[slot : slot + 1].copy(),
            flow=self.flow[slot : slot + 1].copy(),
            cloner=self.cloner[slot : slot + 1].copy(),
            vel=self.vel[slot : slot + 1].copy(),
            streams=self.streams[slot : slot + 1].copy(),
            tick=self.tick,
        )


def make_world(batch: int, h: int, w: int, fill: ElementId | int = ElementId.EMPTY,
               seed: int = 0) -> World:
    """Uniformly filled world with zero velocity and per-slot random streams."""
    if batch < 1 or h < 1 or w < 1:
        raise DomainError(f"world dimensions must be >= 1, got ({batch}, {h}, {w})")
    fill = ElementId(int(fill))
    return World(
        elem=np.full((batch, h, w), int(fill), dtype=np.uint8),
        flow=np.zeros((batch, h, w), dtype=np.int8),
        cloner=np.full((batch, h, w), CLONER_UNSET, dtype=np.int16),
        vel=np.zeros((batch, h, w, 2), dtype=np.float32),
        streams=slot_streams(seed, batch),
    )


def _check_coords(world: World, slot: int, x: int, y: int) -> None:
    if not 0 <= slot < world.batch:
        raise DomainError(f"slot {slot} out of range")
    if not (0 <= x < world.width and 0 <= y < world.height):
        raise DomainError(f"({x}, {y}) outside {world.width}x{world.height} grid")


def set_element(world: World, slot: int, x: int, y: int, elem: ElementId | int) -> None:
    """Write one cell in place. Flow and cloner memory reset; velocity kept."""
    _check_coords(world, slot, x, y)
    try:
        elem = ElementId(int(elem))
    except ValueError:
        raise DomainError(f"invalid element id: {elem!r}") from None
    world.elem[slot, y, x] = int(elem)
    world.flow[slot, y, x] = 0
    world.cloner[slot, y, x] = CLONER_UNSET


def get_element(world: World, slot: int, x: int, y: int) -> ElementId:
    _check_coords(world, slot, x, y)
    return ElementId(int(world.elem[slot, y, x]))


def world_channels(world: World, slot: int) -> np.ndarray:
    """Dense (H, W, 20) float32 view of one slot."""
    if not 0 <= slot < world.batch:
        raise DomainError(f"slot {slot} out of range")
    h, w = world.height, world.width
    out = np.zeros((h, w, N_CHANNELS), dtype=np.float32)
    elem = world.elem[slot]
    onehot = np.eye(N_ELEMENTS, dtype=np.float32)[elem]
    out[:, :, :N_ELEMENTS] = onehot
    out[:, :, 14] = IS_GRAVITY[elem].astype(np.float32)
    out[:, :, 15] = DENSITY[elem].astype(np.float32) / DENSITY_MAX
    out[:, :, 16] = world.flow[slot].astype(np.float32)
    out[:, :, 17] = world.cloner[slot].astype(np.float32)
    out[:, :, 18] = world.vel[slot, :, :, 0]
    out[:, :, 19] = world.vel[slot, :, :, 1]
    return out


def _digest_parts(elem: np.ndarray, flow: np.ndarray, cloner: np.ndarray,
                  vel: np.ndarray) -> int:
    qvel = np.rint(vel.astype(np.float64) / _VEL_QUANTUM).astype("<i8")
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(elem.astype(np.uint8)).tobytes())
    h.update(np.ascontiguousarray(flow.astype("<i1")).tobytes())
    h.update(np.ascontiguousarray(cloner.astype("<i2")).tobytes())
    h.update(np.ascontiguousarray(qvel).tobytes())
    return int.from_bytes(h.digest()[:8], "big")


def world_digest(world: World, slot: int) -> int:
    """Order-stable 64-bit digest of one slot's full state.

    Velocity is quantized to 1e-6 before hashing so the digest is stable
    under round-trips through the float32 channel encoding.
    """
    if not 0 <= slot < world.batch:
        raise DomainError(f"slot {slot} out of range")
    return _digest_parts(
        world.elem[slot], world.flow[slot], world.cloner[slot], world.vel[slot]
    )


def channels_digest(channels: np.ndarray) -> int:
    """Digest of a dense (H, W, 20) observation; matches world_digest."""
    elem = np.argmax(channels[:, :, :N_ELEMENTS], axis=-1).astype(np.uint8)
    flow = np.rint(channels[:, :, 16]).astype(np.int8)
    cloner = np.rint(channels[:, :, 17]).astype(np.int16)
    vel = channels[:, :, 18:20]
    return _digest_parts(elem, flow, cloner, vel)


def element_counts(world: World) -> np.ndarray:
    """(B, 14) per-slot element histograms."""
    b = world.batch
    offset = (np.arange(b, dtype=np.int64)[:, None, None] * N_ELEMENTS)
    flat = (world.elem.astype(np.int64) + offset).ravel()
    return np.bincount(flat, minlength=b * N_ELEMENTS).reshape(b, N_ELEMENTS)


def validate_world(world: World) -> None:
    """Assert the structural invariants; raises AssertionError on violation."""
    assert world.elem.dtype == np.uint8
    assert world.elem.max(initial=0) < N_ELEMENTS
    elem = world.elem
    fluid = IS_FLUID[elem]
    assert np.all(world.flow[~fluid] == 0), "flow memory set on non-fluid cell"
    cloner = elem == int(ElementId.CLONER)
    assert np.all(world.cloner[~cloner] == CLONER_UNSET), "cloner memory on non-cloner"
    assert np.all(np.isfinite(world.vel)), "non-finite velocity"
