"""World-model training pairs and the three element-placement RL tasks.

Actions are multi-discrete (x, y, element, vx, vy). Element 14 is the wind
token; vx/vy are only meaningful for wind and take one of eight discrete
values spanning [-2, 2], so both sub- and super-threshold gusts exist.
"""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .elements import (
    DomainError,
    ElementId,
    World,
    set_element,
    world_channels,
    world_digest,
)
from .engine import RuleConfig, add_wind, step
from .procgen import PcgParams, gen_start_state

__all__ = [
    "WIND",
    "WIND_VALUES",
    "Action",
    "EnvKind",
    "EnvState",
    "WorldModelPair",
    "RejectedActionError",
    "EpisodeDoneError",
    "EPISODE_LENGTH",
    "PLACEMENT_TICKS",
    "gen_world_model_pair",
    "env_reset",
    "env_step",
    "env_observe",
    "eval_heldout",
    "training_params",
    "random_action",
    "scripted_action",
]

WIND = 14  # action-space element token, one past the last real element
WIND_VALUES = tuple(float(v) for v in np.linspace(-2.0, 2.0, 8))

EPISODE_LENGTH = 64
PLACEMENT_TICKS = 5  # Destroying: element placements before the free-run

_SAND = int(ElementId.SAND)
_WATER = int(ElementId.WATER)
_EMPTY = int(ElementId.EMPTY)


class RejectedActionError(Exception):
    """Action disallowed for this task; the episode state is unchanged."""


class EpisodeDoneError(Exception):
    """env_step called on a finished episode."""


class EnvKind(str, Enum):
    SAND_PUSHING = "sand_pushing"
    DESTROYING = "destroying"
    PATH_BUILDING = "path_building"


@dataclass(frozen=True)
class Action:
    x: int
    y: int
    element: int  # ElementId value or WIND
    vx: float = 0.0
    vy: float = 0.0

    def validate(self, h: int = 64, w: int = 64) -> None:
        if not (0 <= self.x < w and 0 <= self.y < h):
            raise RejectedActionError(f"position ({self.x}, {self.y}) out of range")
        if not 0 <= self.element <= WIND:
            raise RejectedActionError(f"unknown element token {self.element}")
        if self.element == WIND:
            for v in (self.vx, self.vy):
                if not any(abs(v - allowed) < 1e-9 for allowed in WIND_VALUES):
                    raise RejectedActionError(f"wind speed {v} not on the discrete grid")


@dataclass(frozen=True)
class WorldModelPair:
    start: World
    target: World
    params: PcgParams
    seed: int


def gen_world_model_pair(params: PcgParams, seed: int) -> WorldModelPair:
    """(start, state 8 ticks later) under the engine's frozen semantics."""
    eff = replace(params, seed=seed)
    start = gen_start_state(eff)
    target = start
    for _ in range(8):
        target = step(target)
    return WorldModelPair(start=start, target=target, params=eff, seed=seed)


# ---------------------------------------------------------------------------
# environments

# Sand-Pushing board geometry (frozen): floor, right wall with a goal notch.
_SP_FLOOR_Y = 40
_SP_SAND = (28, 35, 32, 39)         # x0, x1, y0, y1 (64 sand cells)
_SP_NOTCH = (32, 39)                # open rows in the right wall
_SP_GOAL = (59, 63, 32, 39)

# Path-Building: water source top-left, walled container bottom-right.
_PB_CLONER = (4, 9, 4, 5)
_PB_WATER = (4, 9, 2, 3)
_PB_BOX_X = (50, 59)
_PB_BOX_Y = (52, 60)
_PB_GOAL = (51, 58, 52, 59)


@dataclass
class EnvState:
    kind: EnvKind
    world: World
    tick: int
    goal: tuple  # (x0, x1, y0, y1) inclusive, or None
    budget: int
    done: bool
    params: PcgParams
    seed: int
    config: RuleConfig


def _fill(world: World, x0, x1, y0, y1, elem: ElementId) -> None:
    for y in range(y0, y1 + 1):
        for x in range(x0, x1 + 1):
            set_element(world, 0, x, y, elem)


def _goal_count(state: EnvState, elem: int) -> int:
    x0, x1, y0, y1 = state.goal
    region = state.world.elem[0, y0 : y1 + 1, x0 : x1 + 1]
    return int((region == elem).sum())


def _build_sand_pushing(world: World) -> None:
    _fill(world, 0, 63, _SP_FLOOR_Y, _SP_FLOOR_Y, ElementId.WALL)
    for y in range(0, _SP_FLOOR_Y):
        set_element(world, 0, 63, y, ElementId.WALL)
    for y in range(_SP_NOTCH[0], _SP_NOTCH[1] + 1):
        set_element(world, 0, 63, y, ElementId.EMPTY)
    x0, x1, y0, y1 = _SP_SAND
    _fill(world, x0 - 2, x1 + 2, y0 - 2, y1, ElementId.EMPTY)
    _fill(world, x0, x1, y0, y1, ElementId.SAND)
    gx0, gx1, gy0, gy1 = _SP_GOAL
    _fill(world, gx0, 62, gy0, gy1, ElementId.EMPTY)


def _build_path_building(world: World) -> None:
    _fill(world, *_PB_WATER, ElementId.WATER)
    _fill(world, *_PB_CLONER, ElementId.CLONER)
    bx0, bx1 = _PB_BOX_X
    by0, by1 = _PB_BOX_Y
    _fill(world, bx0 + 1, bx1 - 1, by0, by1 - 1, ElementId.EMPTY)
    for y in range(by0, by1 + 1):
        set_element(world, 0, bx0, y, ElementId.WALL)
        set_element(world, 0, bx1, y, ElementId.WALL)
    _fill(world, bx0, bx1, by1, by1, ElementId.WALL)


def env_reset(kind: EnvKind | str, params: PcgParams, seed: int,
              config: RuleConfig | None = None):
    """Build an episode start state: PCG obstacles, then task furniture."""
    kind = EnvKind(kind)
    world = gen_start_state(replace(params, seed=seed, height=64, width=64))
    goal = None
    budget = 0
    if kind is EnvKind.SAND_PUSHING:
        _build_sand_pushing(world)
        goal = _SP_GOAL
    elif kind is EnvKind.PATH_BUILDING:
        _build_path_building(world)
        goal = _PB_GOAL
    else:
        budget = PLACEMENT_TICKS
    state = EnvState(
        kind=kind, world=world, tick=0, goal=goal, budget=budget, done=False,
        params=params, seed=seed, config=config if config is not None else RuleConfig(),
    )
    return state, env_observe(state)


def env_observe(state: EnvState) -> np.ndarray:
    """Full Markov observation: the (64, 64, 20) channel tensor."""
    return world_channels(state.world, 0)


def _step_sand_pushing(state: EnvState, action: Action) -> float:
    if action.element != WIND:
        raise RejectedActionError("sand-pushing allows only wind placement")
    state.world = add_wind(state.world, 0, action.x, action.y, action.vx, action.vy)
    state.world = step(state.world, state.config)
    state.tick += 1
    state.done = state.tick >= EPISODE_LENGTH
    return float(_goal_count(state, _SAND))


def _step_destroying(state: EnvState, action: Action | None) -> float:
    if state.tick < PLACEMENT_TICKS:
        if action is None:
            raise RejectedActionError("destroying requires an action during placement")
        if action.element == WIND:
            state.world = add_wind(state.world, 0, action.x, action.y, action.vx, action.vy)
        else:
            state.world = state.world.copy()
            set_element(state.world, 0, action.x, action.y, ElementId(action.element))
        state.budget -= 1
    state.world = step(state.world, state.config)
    state.tick += 1
    state.done = state.tick >= PLACEMENT_TICKS + EPISODE_LENGTH
    if not state.done:
        return 0.0
    return float((state.world.elem[0] == _EMPTY).sum())


def _step_path_building(state: EnvState, action: Action) -> float:
    if action.element == int(ElementId.WALL):
        state.world = state.world.copy()
        set_element(state.world, 0, action.x, action.y, ElementId.WALL)
    elif action.element == int(ElementId.EMPTY):
        state.world = state.world.copy()
        if state.world.elem[0, action.y, action.x] == int(ElementId.WALL):
            set_element(state.world, 0, action.x, action.y, ElementId.EMPTY)
    else:
        raise RejectedActionError("path-building allows only wall placement or removal")
    state.world = step(state.world, state.config)
    state.tick += 1
    state.done = state.tick >= EPISODE_LENGTH
    return float(_goal_count(state, _WATER))


def env_step(state: EnvState, action: Action | None):
    """Apply one action; returns (state, observation, reward, done).

    The state object is advanced in place and also returned. A rejected
    action raises without touching the state.
    """
    if state.done:
        raise EpisodeDoneError("episode is finished; reset to continue")
    if state.kind is EnvKind.DESTROYING and state.tick >= PLACEMENT_TICKS:
        action = None  # free-run phase ignores the agent
    if action is not None:
        action.validate(state.world.height, state.world.width)
    if state.kind is EnvKind.SAND_PUSHING:
        reward = _step_sand_pushing(state, action)
    elif state.kind is EnvKind.DESTROYING:
        reward = _step_destroying(state, action)
    else:
        reward = _step_path_building(state, action)
    return state, env_observe(state), reward, state.done


def training_params(max_lines: int = 2, max_circles: int = 2) -> PcgParams:
    """Training distribution: lines and circles only."""
    return PcgParams(max_lines=max_lines, max_circles=max_circles, max_squares=0)


def eval_heldout(kind: EnvKind | str, seed: int,
                 config: RuleConfig | None = None) -> EnvState:
    """Held-out test episode: squares-only obstacles with a disjoint shape
    vocabulary from training (5 squares; 10 for path-building)."""
    kind = EnvKind(kind)
    n = 10 if kind is EnvKind.PATH_BUILDING else 5
    params = PcgParams(max_lines=0, max_circles=0, max_squares=n, exact_counts=True)
    state, _ = env_reset(kind, params, seed, config)
    return state


# ---------------------------------------------------------------------------
# baseline policies for environment sanity checks

def random_action(kind: EnvKind, rng: np.random.Generator) -> Action:
    x, y = int(rng.integers(64)), int(rng.integers(64))
    if kind is EnvKind.SAND_PUSHING:
        return Action(x, y, WIND,
                      WIND_VALUES[rng.integers(8)], WIND_VALUES[rng.integers(8)])
    if kind is EnvKind.PATH_BUILDING:
        elem = int(ElementId.WALL) if rng.integers(2) else int(ElementId.EMPTY)
        return Action(x, y, elem)
    return Action(x, y, int(rng.integers(14)))


def scripted_action(state: EnvState) -> Action:
    """Hand-written baseline: rightward wind (sand-pushing) or acid on the
    densest occupied strip (destroying); path-building digs a channel."""
    if state.kind is EnvKind.SAND_PUSHING:
        sand = np.argwhere(state.world.elem[0] == _SAND)
        if len(sand) == 0:
            return Action(32, 36, WIND, WIND_VALUES[-1], WIND_VALUES[4])
        # blow at the leading edge so the front keeps advancing
        front = sand[:, 1].max()
        y = int(sand[sand[:, 1] >= front - 3][:, 0].mean())
        return Action(max(0, int(front) - 3), y, WIND, WIND_VALUES[-1], WIND_VALUES[4])
    if state.kind is EnvKind.DESTROYING:
        strip = state.tick % PLACEMENT_TICKS
        x0, x1 = strip * 13, min(64, (strip + 1) * 13)
        occupied = np.argwhere(state.world.elem[0, :, x0:x1] != _EMPTY)
        if len(occupied) == 0:
            return Action((x0 + x1) // 2, 32, int(ElementId.ACID))
        y, x = occupied[len(occupied) // 2]
        return Action(int(x) + x0, int(y), int(ElementId.ACID))
    # path-building: clear a straight drop from the source toward the box
    return Action(int(state.tick % 64), 45, int(ElementId.EMPTY))
