#!/usr/bin/env python3
"""Estimate the stochastic reaction rates by direct Monte-Carlo counting.

Builds large single-element ensembles, steps them, and reports the measured
per-tick event frequencies next to their configured values.
"""

import argparse

import numpy as np

from sandsim import ElementId, RuleConfig, make_world, step
from sandsim.config import seed_from_env
from sandsim.rng import slot_streams


def measure_ice_melt(ticks: int, seed: int) -> tuple[float, int]:
    world = make_world(1, 64, 64)
    world.streams = slot_streams(seed, 1)
    world.elem[:] = int(ElementId.ICE)
    events = trials = 0
    for _ in range(ticks):
        before = world.elem.copy()
        world = step(world)
        ice = before == int(ElementId.ICE)
        trials += int(ice.sum())
        events += int((ice & (world.elem == int(ElementId.WATER))).sum())
    return events / trials, trials


def measure_acid_dissolve(ticks: int, seed: int) -> tuple[float, int]:
    # Fresh acid-in-wall lattice per step: every acid cell is wall-locked, so
    # after one tick "acid became empty" can only mean a dissolution event.
    events = trials = 0
    for i in range(ticks):
        world = make_world(1, 64, 64)
        world.streams = slot_streams(seed + i, 1)
        world.elem[:] = int(ElementId.WALL)
        yy, xx = np.mgrid[0:64, 0:64]
        # spacing 3 keeps the acid cells' wall neighborhoods disjoint, so one
        # dissolution can never unlock movement for another acid cell
        acid = (yy % 3 == 0) & (xx % 3 == 0)
        world.elem[0][acid] = int(ElementId.ACID)
        world = step(world)
        trials += int(acid.sum())
        events += int((world.elem[0][acid] == int(ElementId.EMPTY)).sum())
    return events / trials, trials


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ticks", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    seed = seed_from_env(args.seed)
    cfg = RuleConfig()
    melt, n1 = measure_ice_melt(args.ticks, seed)
    acid, n2 = measure_acid_dissolve(args.ticks, seed)
    print(f"{'reaction':>14} {'configured':>11} {'measured':>9} {'events':>9}")
    print(f"{'ice melt':>14} {cfg.ice_melt_chance:>11.3f} {melt:>9.4f} {n1:>9}")
    print(f"{'acid dissolve':>14} {cfg.acid_dissolve_chance:>11.3f} {acid:>9.4f} {n2:>9}")


if __name__ == "__main__":
    main()
