"""The tick function: gravity, piling, fluid flow, reactions, velocity.

All rules are written as whole-grid array operations so runtime is
independent of how many cells are occupied. Movement rules are decomposed
into sub-passes in which every source moves in the same direction; within
such a pass targets are automatically distinct, so no two cells ever write
the same destination.

Out-of-grid neighbors behave as wall: they block motion, are not burnable,
and count as non-empty.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .elements import (
    BURN_CHANCE,
    DENSITY,
    IS_BURNABLE,
    IS_FLUID,
    IS_GRAVITY,
    CLONER_UNSET,
    DomainError,
    ElementId,
    World,
)

__all__ = [
    "RuleConfig",
    "step",
    "apply_gravity",
    "apply_sand_piling",
    "apply_fluid_flow",
    "react_fire",
    "react_ice_water",
    "react_plant",
    "react_lava",
    "react_acid",
    "react_cloner",
    "evolve_velocity",
    "apply_velocity_movement",
    "add_wind",
]

_EMPTY = int(ElementId.EMPTY)
_WALL = int(ElementId.WALL)
_SAND = int(ElementId.SAND)
_WATER = int(ElementId.WATER)
_FIRE = int(ElementId.FIRE)
_PLANT = int(ElementId.PLANT)
_ICE = int(ElementId.ICE)
_DUST = int(ElementId.DUST)
_STONE = int(ElementId.STONE)
_LAVA = int(ElementId.LAVA)
_ACID = int(ElementId.ACID)
_CLONER = int(ElementId.CLONER)

# Sub-stream ids; each rule draws from its own stream every tick so that
# reordering phases during a refactor shows up in digest tests.
_RULE_PILE = 1
_RULE_FLOW = 2
_RULE_FIRE = 3
_RULE_ICE = 4
_RULE_PLANT = 5
_RULE_LAVA = 6
_RULE_ACID = 7

_DIRS4 = ((-1, 0), (1, 0), (0, -1), (0, 1))  # up, down, left, right
_DIRS8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

# Octants in fixed scan order: E, SE, S, SW, W, NW, N, NE ((dx, dy), y down).
_OCT_DXDY = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_OCT_UNITS = tuple(
    (dx / float(np.hypot(dx, dy)), dy / float(np.hypot(dx, dy))) for dx, dy in _OCT_DXDY
)


@dataclass
class RuleConfig:
    """Tunable rule parameters with the engine's frozen defaults."""

    wood_burn_chance: float = 0.05
    plant_burn_chance: float = 0.2
    dust_burn_chance: float = 1.0
    fire_extinguish_chance: float = 0.2
    ice_melt_chance: float = 0.02
    freeze_chance: float = 0.05
    freeze_neighbor_threshold: int = 3
    plant_grow_threshold: int = 4  # strictly greater-than
    plant_grow_chance: float = 0.05
    plant_to_empty_chance: float = 0.05
    acid_dissolve_chance: float = 0.2
    lava_fire_spawn_chance: float = 1.0
    velocity_threshold: float = 1.0
    velocity_decay: float = 0.95
    velocity_advect_fraction: float = 0.5
    velocity_diffuse_center: float = 0.6
    velocity_diffuse_neighbor: float = 0.05
    dust_explosion_impulse: float = 5.0
    # Master switches (used by conservation tests and benchmarks).
    reactions_enabled: bool = True
    velocity_enabled: bool = True

    def __post_init__(self):
        probs = (
            self.wood_burn_chance, self.plant_burn_chance, self.dust_burn_chance,
            self.fire_extinguish_chance, self.ice_melt_chance, self.freeze_chance,
            self.plant_grow_chance, self.plant_to_empty_chance,
            self.acid_dissolve_chance, self.lava_fire_spawn_chance,
        )
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise DomainError("rule probabilities must lie in [0, 1]")
        if not 0.0 < self.velocity_decay < 1.0:
            raise DomainError("velocity_decay must lie in (0, 1)")
        if self.velocity_threshold <= 0 or self.freeze_neighbor_threshold <= 0:
            raise DomainError("thresholds must be positive")

    def burn_table(self) -> np.ndarray:
        table = BURN_CHANCE.copy()
        table[ElementId.WOOD] = self.wood_burn_chance
        table[ElementId.PLANT] = self.plant_burn_chance
        table[ElementId.DUST] = self.dust_burn_chance
        return table


DEFAULT_CONFIG = RuleConfig()


# ---------------------------------------------------------------------------
# array helpers

def _shifted(a: np.ndarray, dy: int, dx: int, fill) -> np.ndarray:
    """out[b, y, x] = a[b, y + dy, x + dx], `fill` outside the grid."""
    out = np.full_like(a, fill)
    h, w = a.shape[1], a.shape[2]
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    if y0 < y1 and x0 < x1:
        out[:, y0:y1, x0:x1] = a[:, y0 + dy : y1 + dy, x0 + dx : x1 + dx]
    return out


def _swap(world: World, mask: np.ndarray, dy: int, dx: int, props=()):
    """Swap every masked cell with its neighbor at offset (dy, dx).

    Element, flow memory, cloner memory, and any extra per-cell property
    planes in `props` travel; velocity stays with the grid position. The
    caller guarantees masked cells have in-bounds targets and that sources
    and targets are disjoint. Returns flat (source, target) index arrays.
    """
    src = np.flatnonzero(mask)
    if src.size == 0:
        return src, src
    tgt = src + (dy * mask.shape[2] + dx)
    for arr in (world.elem, world.flow, world.cloner, *props):
        flat = arr.reshape(-1)
        tmp = flat[src].copy()
        flat[src] = flat[tgt]
        flat[tgt] = tmp
    return src, tgt


def _any_neighbor(mask: np.ndarray, dirs) -> np.ndarray:
    out = np.zeros_like(mask)
    for dy, dx in dirs:
        out |= _shifted(mask, dy, dx, False)
    return out


def _count_neighbors(mask: np.ndarray, dirs) -> np.ndarray:
    out = np.zeros(mask.shape, dtype=np.int8)
    for dy, dx in dirs:
        out += _shifted(mask, dy, dx, False)
    return out


def _uniforms(world: World, rule: int) -> np.ndarray:
    return rng.rule_uniforms(world.streams, world.tick, rule, world.height, world.width)


def _octant_index(vel: np.ndarray) -> np.ndarray:
    """Dominant octant per cell; ties resolve to the lowest octant index."""
    vx = vel[..., 0].astype(np.float64)
    vy = vel[..., 1].astype(np.float64)
    dots = np.stack([vx * ux + vy * uy for ux, uy in _OCT_UNITS], axis=0)
    return np.argmax(dots, axis=0)


# ---------------------------------------------------------------------------
# movement rules

def _mark(done: np.ndarray, src: np.ndarray, tgt: np.ndarray) -> None:
    flat = done.reshape(-1)
    flat[src] = True
    flat[tgt] = True


def _gravity(world: World) -> None:
    # Highest density first: establishes an order so a vertical stack of
    # mixed densities never produces two swaps into the same cell.
    dens = DENSITY[world.elem]
    grav = IS_GRAVITY[world.elem]
    for level in (4, 3, 2, 1):
        mask = (
            grav
            & (dens == level)
            & _shifted(grav, 1, 0, False)
            & (_shifted(dens, 1, 0, np.int8(DENSITY[_WALL])) < level)
        )
        _swap(world, mask, 1, 0, props=(dens, grav))


def _piling(world: World) -> None:
    bit_left = _uniforms(world, _RULE_PILE) < 0.5
    done = np.zeros_like(bit_left)
    dens = DENSITY[world.elem]
    grav = IS_GRAVITY[world.elem]
    sandlike = (world.elem == _SAND) | (world.elem == _DUST)
    wall_d = np.int8(DENSITY[_WALL])
    # (preferred-direction pass 1 and 2, then fallback passes 3 and 4)
    for pref, dx in ((bit_left, -1), (~bit_left, 1), (bit_left, 1), (~bit_left, -1)):
        can_fall = _shifted(grav, 1, 0, False) & (_shifted(dens, 1, 0, wall_d) < dens)
        diag_ok = _shifted(grav, 1, dx, False) & (_shifted(dens, 1, dx, wall_d) < dens)
        src = sandlike & ~can_fall & pref & ~done & diag_ok
        s, t = _swap(world, src, 1, dx, props=(dens, grav, sandlike))
        _mark(done, s, t)


def _fluid_flow(world: World) -> None:
    bit_left = _uniforms(world, _RULE_FLOW) < 0.5
    done = np.zeros_like(bit_left)
    dens = DENSITY[world.elem]
    grav = IS_GRAVITY[world.elem]
    fluid = IS_FLUID[world.elem]
    empty = world.elem == _EMPTY
    wall_d = np.int8(DENSITY[_WALL])
    flow_flat = world.flow.reshape(-1)

    # Fluids fall diagonally like grains before flowing sideways; without
    # this, a nearly-level pool can chase its own hole forever.
    for pref, dx in ((bit_left, -1), (~bit_left, 1), (bit_left, 1), (~bit_left, -1)):
        can_fall = _shifted(grav, 1, 0, False) & (_shifted(dens, 1, 0, wall_d) < dens)
        diag_ok = _shifted(grav, 1, dx, False) & (_shifted(dens, 1, dx, wall_d) < dens)
        src = fluid & ~can_fall & pref & ~done & diag_ok
        s, t = _swap(world, src, 1, dx, props=(dens, grav, fluid, empty))
        flow_flat[t] = dx
        _mark(done, s, t)

    # Remembered direction first, random for fresh fluid, then the other side.
    passes = (
        (lambda flow: (flow == -1) | ((flow == 0) & bit_left), -1),
        (lambda flow: (flow == 1) | ((flow == 0) & ~bit_left), 1),
        (lambda flow: (flow == -1) | ((flow == 0) & bit_left), 1),
        (lambda flow: (flow == 1) | ((flow == 0) & ~bit_left), -1),
    )
    for pref, dx in passes:
        can_fall = _shifted(grav, 1, 0, False) & (_shifted(dens, 1, 0, wall_d) < dens)
        lateral_empty = _shifted(empty, 0, dx, False)
        src = fluid & ~can_fall & ~done & pref(world.flow) & lateral_empty
        s, t = _swap(world, src, 0, dx, props=(dens, grav, fluid, empty))
        flow_flat[t] = dx
        _mark(done, s, t)


def _velocity_movement(world: World, cfg: RuleConfig) -> None:
    vel = world.vel
    mag = np.hypot(vel[..., 0], vel[..., 1])
    fast = mag > cfg.velocity_threshold
    if not fast.any():
        return
    octant = _octant_index(vel)
    done = np.zeros_like(fast)
    movable = (world.elem != _WALL) & (world.elem != _EMPTY)
    empty = world.elem == _EMPTY
    for k, (dx, dy) in enumerate(_OCT_DXDY):
        tgt_empty = _shifted(empty, dy, dx, False)
        src = fast & (octant == k) & movable & tgt_empty & ~done
        s, t = _swap(world, src, dy, dx, props=(movable, empty))
        _mark(done, s, t)


def _evolve_velocity(world: World, cfg: RuleConfig) -> None:
    if not world.vel.any():
        return
    vel = world.vel.astype(np.float64)
    mag = np.hypot(vel[..., 0], vel[..., 1])
    octant = _octant_index(vel)
    moving = mag > 0

    # Advection: each cell pushes a fraction of its vector one step along its
    # dominant octant; the pushed fraction leaves the source.
    outgo = cfg.velocity_advect_fraction * vel * moving[..., None]
    new = vel - outgo
    for k, (dx, dy) in enumerate(_OCT_DXDY):
        sel = (octant == k) & moving
        contrib = np.where(sel[..., None], outgo, 0.0)
        # arriving at (y, x) from the cell at (y - dy, x - dx)
        new[..., 0] += _shifted(contrib[..., 0], -dy, -dx, 0.0)
        new[..., 1] += _shifted(contrib[..., 1], -dy, -dx, 0.0)

    # Diffusion: 3x3 kernel, zero beyond the boundary.
    diffused = cfg.velocity_diffuse_center * new
    for dy, dx in _DIRS8:
        diffused[..., 0] += cfg.velocity_diffuse_neighbor * _shifted(new[..., 0], dy, dx, 0.0)
        diffused[..., 1] += cfg.velocity_diffuse_neighbor * _shifted(new[..., 1], dy, dx, 0.0)

    world.vel[:] = (diffused * cfg.velocity_decay).astype(np.float32)


# ---------------------------------------------------------------------------
# reactions

def _fire(world: World, cfg: RuleConfig) -> None:
    elem = world.elem
    if not (elem == _FIRE).any():
        return
    u = _uniforms(world, _RULE_FIRE)
    fire_near = _any_neighbor(elem == _FIRE, _DIRS8)
    burnable_near = _any_neighbor(IS_BURNABLE[elem], _DIRS8)
    ignite = IS_BURNABLE[elem] & fire_near & (u < cfg.burn_table()[elem])
    extinguish = (elem == _FIRE) & ~burnable_near & (u < cfg.fire_extinguish_chance)
    dust_blast = ignite & (elem == _DUST)

    elem[ignite] = _FIRE
    elem[extinguish] = _EMPTY

    if dust_blast.any():
        # Radial impulse into the 3x3 ring around each ignited dust cell.
        for dy, dx in _DIRS8:
            norm = float(np.hypot(dx, dy))
            hit = _shifted(dust_blast, -dy, -dx, False)
            world.vel[..., 0] += hit * np.float32(cfg.dust_explosion_impulse * dx / norm)
            world.vel[..., 1] += hit * np.float32(cfg.dust_explosion_impulse * dy / norm)


def _ice_water(world: World, cfg: RuleConfig) -> None:
    elem = world.elem
    if not (elem == _ICE).any():
        return
    u = _uniforms(world, _RULE_ICE)
    melt = (elem == _ICE) & (u < cfg.ice_melt_chance)
    ice_count = _count_neighbors(elem == _ICE, _DIRS8)
    freeze = (
        (elem == _WATER)
        & (ice_count >= cfg.freeze_neighbor_threshold)
        & (u < cfg.freeze_chance)
    )
    elem[melt] = _WATER
    elem[freeze] = _ICE
    world.flow[freeze] = 0


def _plant(world: World, cfg: RuleConfig) -> None:
    elem = world.elem
    if not ((elem == _PLANT).any() and (elem == _WATER).any()):
        return
    u = _uniforms(world, _RULE_PLANT)
    crowded = (elem == _WATER) & (
        _count_neighbors(elem == _PLANT, _DIRS8) > cfg.plant_grow_threshold
    )
    grow = crowded & (u < cfg.plant_grow_chance)
    vanish = crowded & ~grow & (u < cfg.plant_grow_chance + cfg.plant_to_empty_chance)
    elem[grow] = _PLANT
    elem[vanish] = _EMPTY
    world.flow[grow | vanish] = 0


def _lava(world: World, cfg: RuleConfig) -> None:
    elem = world.elem
    if not (elem == _LAVA).any():
        return
    solidify = (elem == _LAVA) & _any_neighbor(elem == _WATER, _DIRS4)
    u = _uniforms(world, _RULE_LAVA)
    spawn = (
        (elem == _EMPTY)
        & _any_neighbor(elem == _LAVA, _DIRS4)
        & (u < cfg.lava_fire_spawn_chance)
    )
    elem[solidify] = _STONE
    world.flow[solidify] = 0
    elem[spawn] = _FIRE


def _acid(world: World, cfg: RuleConfig) -> None:
    elem = world.elem
    if not (elem == _ACID).any():
        return
    nonempty_near = np.zeros(elem.shape, dtype=bool)
    for dy, dx in _DIRS4:
        nonempty_near |= _shifted(elem, dy, dx, _WALL) != _EMPTY
    u = _uniforms(world, _RULE_ACID)
    event = (elem == _ACID) & nonempty_near & (u < cfg.acid_dissolve_chance)
    cleared = event | ((elem != _EMPTY) & _any_neighbor(event, _DIRS4))
    elem[cleared] = _EMPTY
    world.flow[cleared] = 0
    world.cloner[cleared] = CLONER_UNSET


def _cloner(world: World) -> None:
    elem = world.elem
    if not (elem == _CLONER).any():
        return
    mem = world.cloner
    adoptable = (elem != _EMPTY) & (elem != _CLONER) & (elem != _WALL)
    unset = (elem == _CLONER) & (mem == CLONER_UNSET)
    for dy, dx in _DIRS4:
        nb_elem = _shifted(elem, dy, dx, _WALL)
        nb_ok = _shifted(adoptable, dy, dx, False)
        take = unset & (mem == CLONER_UNSET) & nb_ok
        mem[take] = nb_elem[take]

    armed = (elem == _CLONER) & (mem != CLONER_UNSET)
    filled = np.zeros(elem.shape, dtype=bool)
    for dy, dx in _DIRS4:
        nb_armed = _shifted(armed, dy, dx, False)
        nb_mem = _shifted(mem, dy, dx, CLONER_UNSET)
        emit = (elem == _EMPTY) & ~filled & nb_armed
        elem[emit] = nb_mem[emit].astype(np.uint8)
        filled |= emit


# ---------------------------------------------------------------------------
# public operations

def _via_copy(fn):
    def wrapper(world: World, *args, **kwargs) -> World:
        out = world.copy()
        fn(out, *args, **kwargs)
        return out
    return wrapper


apply_gravity = _via_copy(_gravity)
apply_sand_piling = _via_copy(_piling)
apply_fluid_flow = _via_copy(_fluid_flow)
react_cloner = _via_copy(_cloner)


def react_fire(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _fire(out, cfg)
    return out


def react_ice_water(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _ice_water(out, cfg)
    return out


def react_plant(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _plant(out, cfg)
    return out


def react_lava(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _lava(out, cfg)
    return out


def react_acid(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _acid(out, cfg)
    return out


def evolve_velocity(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _evolve_velocity(out, cfg)
    return out


def apply_velocity_movement(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    out = world.copy()
    _velocity_movement(out, cfg)
    return out


def step(world: World, cfg: RuleConfig = DEFAULT_CONFIG) -> World:
    """Advance every slot one tick; the input world is left untouched.

    Phase order (frozen): cloner emission, reactions (fire, ice/water,
    plant, lava, acid), gravity, sand piling, fluid flow, velocity
    evolution, velocity-driven displacement.
    """
    out = world.copy()
    if cfg.reactions_enabled:
        _cloner(out)
        _fire(out, cfg)
        _ice_water(out, cfg)
        _plant(out, cfg)
        _lava(out, cfg)
        _acid(out, cfg)
    _gravity(out)
    _piling(out)
    _fluid_flow(out)
    if cfg.velocity_enabled:
        _evolve_velocity(out, cfg)
        _velocity_movement(out, cfg)
    out.tick = world.tick + 1
    return out


def add_wind(world: World, slot: int, x: int, y: int, vx: float, vy: float) -> World:
    """Add (vx, vy) to the velocity field in the 10x10 square whose top-left
    corner is (x - 5, y - 5), clipped at the borders."""
    if not 0 <= slot < world.batch:
        raise DomainError(f"slot {slot} out of range")
    if not (0 <= x < world.width and 0 <= y < world.height):
        raise DomainError(f"wind center ({x}, {y}) out of range")
    out = world.copy()
    y0, y1 = max(0, y - 5), min(world.height, y + 5)
    x0, x1 = max(0, x - 5), min(world.width, x + 5)
    out.vel[slot, y0:y1, x0:x1, 0] += np.float32(vx)
    out.vel[slot, y0:y1, x0:x1, 1] += np.float32(vy)
    return out
