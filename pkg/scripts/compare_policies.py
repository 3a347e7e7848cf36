#!/usr/bin/env python3
"""Compare the scripted baseline policies against uniform-random play.

Runs full episodes of each task over a set of seeds and prints mean episode
rewards for both policies. Useful as a sanity dashboard when touching either
the environments or the engine.
"""

import argparse

import numpy as np

from sandsim.config import seed_from_env
from sandsim.tasks import (
    EnvKind,
    env_reset,
    env_step,
    random_action,
    scripted_action,
    training_params,
)


def run_episode(kind: EnvKind, seed: int, policy: str) -> float:
    state, _ = env_reset(kind, training_params(), seed)
    rng = np.random.default_rng(seed)
    total = 0.0
    done = False
    while not done:
        if policy == "random":
            action = random_action(kind, rng)
        else:
            action = scripted_action(state)
        state, _, reward, done = env_step(state, action)
        total += reward
    return total


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    base = seed_from_env(args.seed)
    print(f"{'task':>14} {'scripted':>10} {'random':>10}")
    for kind in EnvKind:
        means = {}
        for policy in ("scripted", "random"):
            rewards = [run_episode(kind, base + s, policy)
                       for s in range(args.seeds)]
            means[policy] = float(np.mean(rewards))
        print(f"{kind.value:>14} {means['scripted']:>10.1f} {means['random']:>10.1f}")


if __name__ == "__main__":
    main()
