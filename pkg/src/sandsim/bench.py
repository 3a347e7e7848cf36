"""Throughput measurement for the step function.

Reports steps/sec (one step = one tick of the whole batch) across batch
sizes and fill patterns, plus the all-wall vs all-empty cost ratio that
guards against degenerate fast paths dominating the numbers.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .elements import ElementId, make_world
from .engine import DEFAULT_CONFIG, RuleConfig, step

__all__ = ["BenchResult", "run_bench", "format_table"]

DEFAULT_BATCHES = (1, 8, 32)
DEFAULT_FILLS = ("empty", "wall", "sand", "mixed")


@dataclass
class BenchResult:
    height: int
    width: int
    ticks: int
    rows: list = field(default_factory=list)  # dicts: batch, fill, steps_per_sec

    def wall_empty_ratio(self, batch: int = 32) -> float:
        per = {r["fill"]: r["steps_per_sec"] for r in self.rows if r["batch"] == batch}
        return per["empty"] / per["wall"]

    def to_dict(self) -> dict:
        return {"height": self.height, "width": self.width, "ticks": self.ticks,
                "rows": self.rows}


def _filled_world(batch: int, h: int, w: int, fill: str):
    world = make_world(batch, h, w)
    if fill == "empty":
        pass
    elif fill == "wall":
        world.elem[:] = int(ElementId.WALL)
    elif fill == "sand":
        world.elem[:] = int(ElementId.SAND)
    elif fill == "mixed":
        rng = np.random.default_rng(0)
        world.elem[:] = rng.integers(0, 14, size=world.elem.shape, dtype=np.uint8)
    else:
        raise ValueError(f"unknown fill {fill!r}")
    return world


def _time_fill(batch: int, h: int, w: int, fill: str, ticks: int,
               cfg: RuleConfig) -> float:
    world = _filled_world(batch, h, w, fill)
    world = step(world, cfg)  # warm-up outside the timed region
    t0 = time.perf_counter()
    for _ in range(ticks):
        world = step(world, cfg)
    return ticks / (time.perf_counter() - t0)


def run_bench(batches=DEFAULT_BATCHES, fills=DEFAULT_FILLS, ticks: int = 32,
              h: int = 64, w: int = 64, cfg: RuleConfig = DEFAULT_CONFIG) -> BenchResult:
    result = BenchResult(height=h, width=w, ticks=ticks)
    if ticks <= 0:
        return result
    for batch in batches:
        for fill in fills:
            sps = _time_fill(batch, h, w, fill, ticks, cfg)
            result.rows.append({"batch": batch, "fill": fill,
                                "steps_per_sec": round(sps, 2),
                                "cell_updates_per_sec": round(sps * batch * h * w)})
    return result


def format_table(result: BenchResult) -> str:
    lines = [f"grid {result.height}x{result.width}, {result.ticks} timed ticks",
             f"{'batch':>6} {'fill':>8} {'steps/s':>10} {'cells/s':>14}"]
    for r in result.rows:
        lines.append(f"{r['batch']:>6} {r['fill']:>8} {r['steps_per_sec']:>10.2f} "
                     f"{r['cell_updates_per_sec']:>14}")
    if any(r["batch"] == 32 for r in result.rows):
        lines.append(f"all-wall vs all-empty time ratio at batch 32: "
                     f"{result.wall_empty_ratio(32):.3f}")
    return "\n".join(lines)
