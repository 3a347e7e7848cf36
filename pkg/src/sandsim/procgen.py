"""Start-state synthesis by random shape drawing, plus the frozen suite of
hand-built interaction scenarios used as engine regression anchors.

Shape semantics:
  line    cells whose Euclidean distance to the segment is < thickness
          (thickness 1 gives a single-cell-wide stroke)
  circle  cells within distance <= radius of the center
  square  axis-aligned block of half-side `radius` (radius 2 -> 5x5)
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .elements import CLONER_UNSET, DomainError, ElementId, World, make_world, set_element
from .engine import RuleConfig, step
from .rng import mix64

__all__ = [
    "PcgParams",
    "TestScenario",
    "draw_line",
    "draw_circle",
    "draw_square",
    "gen_start_state",
    "test_suite",
    "run_scenario",
]

_PCG_TAG = 0x50434701  # stream domain tag for start-state synthesis

DEFAULT_PALETTE = tuple(e for e in ElementId if e != ElementId.EMPTY)


@dataclass(frozen=True)
class PcgParams:
    """Controls for random start-state synthesis."""

    max_lines: int = 5
    max_circles: int = 5
    max_squares: int = 5
    element_palette: tuple = DEFAULT_PALETTE
    thickness_range: tuple = (1, 3)
    radius_range: tuple = (2, 10)
    height: int = 64
    width: int = 64
    seed: int = 0
    exact_counts: bool = False  # draw exactly max_* shapes instead of U[0, max]

    def __post_init__(self):
        if not self.element_palette:
            raise DomainError("element palette must be non-empty")
        if min(self.max_lines, self.max_circles, self.max_squares) < 0:
            raise DomainError("shape maxima must be >= 0")
        for lo, hi in (self.thickness_range, self.radius_range):
            if lo > hi or lo < 0:
                raise DomainError("degenerate geometry range")


def _paint(world: World, slot: int, mask: np.ndarray, elem: ElementId) -> None:
    world.elem[slot][mask] = int(elem)
    world.flow[slot][mask] = 0
    world.cloner[slot][mask] = CLONER_UNSET


def _grid(world: World):
    ys, xs = np.mgrid[0 : world.height, 0 : world.width]
    return xs.astype(np.float64), ys.astype(np.float64)


def draw_line(world: World, slot: int, x1: int, y1: int, x2: int, y2: int,
              thickness: int, elem: ElementId) -> World:
    """Stroke the segment (x1,y1)-(x2,y2); degenerate segments give a dot."""
    if thickness <= 0:
        raise DomainError("line thickness must be positive")
    for x, y in ((x1, y1), (x2, y2)):
        if not (0 <= x < world.width and 0 <= y < world.height):
            raise DomainError(f"line endpoint ({x}, {y}) out of range")
    out = world.copy()
    xs, ys = _grid(world)
    dx, dy = x2 - x1, y2 - y1
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        dist = np.hypot(xs - x1, ys - y1)
    else:
        t = np.clip(((xs - x1) * dx + (ys - y1) * dy) / seg2, 0.0, 1.0)
        dist = np.hypot(xs - (x1 + t * dx), ys - (y1 + t * dy))
    _paint(out, slot, dist < thickness, elem)
    return out


def draw_circle(world: World, slot: int, x: int, y: int, r: int,
                elem: ElementId) -> World:
    if r < 0:
        raise DomainError("circle radius must be >= 0")
    if not (0 <= x < world.width and 0 <= y < world.height):
        raise DomainError(f"circle center ({x}, {y}) out of range")
    out = world.copy()
    xs, ys = _grid(world)
    _paint(out, slot, np.hypot(xs - x, ys - y) <= r, elem)
    return out


def draw_square(world: World, slot: int, x: int, y: int, r: int,
                elem: ElementId) -> World:
    if r < 0:
        raise DomainError("square radius must be >= 0")
    if not (0 <= x < world.width and 0 <= y < world.height):
        raise DomainError(f"square center ({x}, {y}) out of range")
    out = world.copy()
    xs, ys = _grid(world)
    _paint(out, slot, (np.abs(xs - x) <= r) & (np.abs(ys - y) <= r), elem)
    return out


def gen_start_state(params: PcgParams) -> World:
    """Deterministic single-slot start state for (params, params.seed).

    Shapes draw in painter's order: lines, then circles, then squares.
    """
    gen = np.random.Generator(
        np.random.Philox(key=np.array([mix64(params.seed, _PCG_TAG), 0], dtype=np.uint64))
    )
    world = make_world(1, params.height, params.width, ElementId.EMPTY, seed=params.seed)
    palette = list(params.element_palette)
    h, w = params.height, params.width

    def pick_elem() -> ElementId:
        return ElementId(int(palette[gen.integers(len(palette))]))

    def n_shapes(maximum: int) -> int:
        if params.exact_counts:
            return maximum
        return int(gen.integers(maximum + 1))

    for _ in range(n_shapes(params.max_lines)):
        elem = pick_elem()
        x1, x2 = int(gen.integers(w)), int(gen.integers(w))
        y1, y2 = int(gen.integers(h)), int(gen.integers(h))
        t = int(gen.integers(params.thickness_range[0], params.thickness_range[1] + 1))
        world = draw_line(world, 0, x1, y1, x2, y2, t, elem)
    for _ in range(n_shapes(params.max_circles)):
        elem = pick_elem()
        x, y = int(gen.integers(w)), int(gen.integers(h))
        r = int(gen.integers(params.radius_range[0], params.radius_range[1] + 1))
        world = draw_circle(world, 0, x, y, r, elem)
    for _ in range(n_shapes(params.max_squares)):
        elem = pick_elem()
        x, y = int(gen.integers(w)), int(gen.integers(h))
        r = int(gen.integers(params.radius_range[0], params.radius_range[1] + 1))
        world = draw_square(world, 0, x, y, r, elem)
    return world


# ---------------------------------------------------------------------------
# interaction scenarios


@dataclass(frozen=True)
class TestScenario:
    """A frozen start state plus a predicate over the evolved world."""

    name: str
    build: Callable[[], World]
    check: Callable[[World, World], bool]
    horizon: int = 8
    long_horizon: int = 16


def run_scenario(scenario: TestScenario, horizon: int | None = None,
                 cfg: RuleConfig | None = None) -> bool:
    start = scenario.build()
    world = start
    for _ in range(horizon if horizon is not None else scenario.horizon):
        world = step(world, cfg) if cfg is not None else step(world)
    return scenario.check(start, world)


def _count(world: World, elem: ElementId) -> int:
    return int((world.elem[0] == int(elem)).sum())


def _hline(w, y, x0, x1, elem):
    for x in range(x0, x1 + 1):
        set_element(w, 0, x, y, elem)


def _vline(w, x, y0, y1, elem):
    for y in range(y0, y1 + 1):
        set_element(w, 0, x, y, elem)


def _block(w, x0, x1, y0, y1, elem):
    for y in range(y0, y1 + 1):
        for x in range(x0, x1 + 1):
            set_element(w, 0, x, y, elem)


def _build_sand_through_water() -> World:
    w = make_world(1, 64, 64, seed=101)
    _hline(w, 50, 18, 38, ElementId.WALL)
    _vline(w, 18, 42, 50, ElementId.WALL)
    _vline(w, 38, 42, 50, ElementId.WALL)
    _block(w, 19, 37, 47, 49, ElementId.WATER)
    _block(w, 27, 28, 45, 46, ElementId.SAND)
    return w


def _check_sand_below_water(start: World, world: World) -> bool:
    e = world.elem[0]
    ok = False
    for x in range(world.width):
        sand_rows = np.flatnonzero(e[:, x] == int(ElementId.SAND))
        water_rows = np.flatnonzero(e[:, x] == int(ElementId.WATER))
        if len(sand_rows) and len(water_rows):
            ok = True
            if sand_rows.min() <= water_rows.max():
                return False
    return ok


def _build_fire_burns_plant() -> World:
    w = make_world(1, 64, 64, seed=102)
    _hline(w, 29, 8, 42, ElementId.WALL)     # ceiling keeps fire on the vine
    _hline(w, 30, 10, 40, ElementId.PLANT)
    _block(w, 10, 12, 31, 31, ElementId.FIRE)
    return w


def _check_plant_burned(start: World, world: World) -> bool:
    return _count(world, ElementId.PLANT) < _count(start, ElementId.PLANT)


def _build_gas_rises() -> World:
    w = make_world(1, 64, 64, seed=103)
    _block(w, 28, 31, 50, 50, ElementId.GAS)
    return w


def _check_gas_above(start: World, world: World) -> bool:
    gas_rows = np.flatnonzero((world.elem[0] == int(ElementId.GAS)).any(axis=1))
    return len(gas_rows) > 0 and gas_rows.max() < 50


def _build_water_around_obstacle() -> World:
    w = make_world(1, 64, 64, seed=104)
    _hline(w, 50, 11, 30, ElementId.WALL)
    _vline(w, 11, 40, 50, ElementId.WALL)
    _vline(w, 30, 40, 50, ElementId.WALL)
    _vline(w, 18, 42, 47, ElementId.WALL)    # pillar with a gap underneath
    _block(w, 12, 16, 47, 49, ElementId.WATER)
    return w


def _check_water_passed(start: World, world: World) -> bool:
    water = world.elem[0] == int(ElementId.WATER)
    return bool(water[:, 19:30].any())


def _build_ice_freezes_water() -> World:
    w = make_world(1, 64, 64, seed=105)
    _block(w, 20, 27, 20, 27, ElementId.ICE)
    _vline(w, 29, 19, 28, ElementId.WALL)
    set_element(w, 0, 28, 28, ElementId.WALL)
    _vline(w, 28, 20, 27, ElementId.WATER)
    return w


def _check_water_froze(start: World, world: World) -> bool:
    was_water = start.elem[0] == int(ElementId.WATER)
    now_ice = world.elem[0] == int(ElementId.ICE)
    return bool((was_water & now_ice).any())


def _build_lava_meets_water() -> World:
    w = make_world(1, 64, 64, seed=106)
    _hline(w, 50, 28, 36, ElementId.WALL)
    _vline(w, 28, 46, 50, ElementId.WALL)
    _vline(w, 36, 46, 50, ElementId.WALL)
    _block(w, 29, 35, 49, 49, ElementId.WATER)
    set_element(w, 0, 32, 48, ElementId.LAVA)
    return w


def _check_stone_formed(start: World, world: World) -> bool:
    return _count(world, ElementId.STONE) >= 1


def _build_acid_dissolves_wall() -> World:
    w = make_world(1, 64, 64, seed=107)
    _hline(w, 40, 20, 30, ElementId.WALL)
    _block(w, 22, 28, 39, 39, ElementId.ACID)
    return w


def _check_wall_breached(start: World, world: World) -> bool:
    return _count(world, ElementId.WALL) < _count(start, ElementId.WALL)


def _build_dust_explosion() -> World:
    w = make_world(1, 64, 64, seed=108)
    _hline(w, 50, 20, 40, ElementId.WALL)
    _block(w, 28, 33, 46, 49, ElementId.DUST)
    set_element(w, 0, 27, 49, ElementId.FIRE)
    return w


def _check_dust_scattered(start: World, world: World) -> bool:
    box = world.elem[0][45:50, 27:35]
    remaining = int((box == int(ElementId.DUST)).sum())
    return remaining < _count(start, ElementId.DUST) // 2


def test_suite() -> list[TestScenario]:
    """The eight frozen interaction scenarios, in canonical order."""
    return [
        TestScenario("sand-through-water", _build_sand_through_water, _check_sand_below_water),
        TestScenario("fire-burns-plant-vine", _build_fire_burns_plant, _check_plant_burned),
        TestScenario("gas-rises-through-cavity", _build_gas_rises, _check_gas_above),
        TestScenario("water-flows-around-obstacle", _build_water_around_obstacle, _check_water_passed),
        TestScenario("ice-freezes-adjacent-water", _build_ice_freezes_water, _check_water_froze),
        TestScenario("lava-meets-water-makes-stone", _build_lava_meets_water, _check_stone_formed),
        TestScenario("acid-dissolves-wall-bridge", _build_acid_dissolves_wall, _check_wall_breached),
        TestScenario("dust-explosion-scatters", _build_dust_explosion, _check_dust_scattered),
    ]
