"""Command-line entry point.

Subcommands: gen-dataset, bench, env-serve, sandbox-serve, eval-tests, sim.
The PW_SEED environment variable overrides any seed argument globally.
"""

import argparse
import asyncio
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .bench import format_table, run_bench
from .config import ConfigError, format_config, load_config_file, seed_from_env
from .elements import make_world, world_digest
from .engine import step
from .procgen import PcgParams, gen_start_state, test_suite, run_scenario
from .sandbox import DEFAULT_TPS, serve_sandbox
from .serialize import ParseError, load_world, save_world
from .tasks import gen_world_model_pair
from .wire import serve_stdio


def _load_cfg(path: str | None):
    if path is None:
        return PcgParams(), None
    pcg, rules = load_config_file(path)
    return pcg, rules


def cmd_gen_dataset(args) -> int:
    pcg, _ = _load_cfg(args.config)
    seed = seed_from_env(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pairs = []
    for i in range(args.count):
        pair = gen_world_model_pair(pcg, seed + i)
        start_name = f"pair_{i:05d}_start.pwld"
        target_name = f"pair_{i:05d}_target.pwld"
        (out / start_name).write_bytes(save_world(pair.start, args.mode))
        (out / target_name).write_bytes(save_world(pair.target, args.mode))
        pairs.append({
            "seed": pair.seed,
            "start": start_name,
            "target": target_name,
            "start_digest": world_digest(pair.start, 0),
            "target_digest": world_digest(pair.target, 0),
        })
    manifest = {
        "generator_version": __version__,
        "base_seed": seed,
        "count": args.count,
        "mode": args.mode,
        "params": dataclasses.asdict(
            dataclasses.replace(pcg, element_palette=tuple(
                int(e) for e in pcg.element_palette))),
        "pairs": pairs,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {args.count} pairs to {out} (manifest.json included)")
    return 0


def cmd_bench(args) -> int:
    batches = tuple(int(b) for b in args.batches.split(","))
    fills = tuple(args.fills.split(","))
    result = run_bench(batches=batches, fills=fills, ticks=args.ticks)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        print(format_table(result))
    return 0


def cmd_env_serve(args) -> int:
    serve_stdio()
    return 0


def cmd_sandbox_serve(args) -> int:
    pcg, rules = _load_cfg(args.config)
    params = pcg if args.config is not None else None
    try:
        asyncio.run(serve_sandbox(host=args.host, port=args.port, params=params,
                                  config=rules, tick_rate=args.tick_rate,
                                  include_velocity=args.velocity))
    except KeyboardInterrupt:
        pass
    return 0


def cmd_eval_tests(args) -> int:
    _, rules = _load_cfg(args.config)
    failures = 0
    for scenario in test_suite():
        line = [scenario.name]
        for horizon in (scenario.horizon, scenario.long_horizon):
            ok = run_scenario(scenario, horizon, rules)
            line.append(f"h={horizon}:{'PASS' if ok else 'FAIL'}")
            failures += 0 if ok else 1
        start = scenario.build()
        world = start
        for _ in range(scenario.long_horizon):
            world = step(world, rules) if rules is not None else step(world)
        line.append(f"digest={world_digest(world, 0):#018x}")
        print("  ".join(line))
    print(f"{'all scenarios passed' if failures == 0 else f'{failures} check(s) failed'}")
    return 0 if failures == 0 else 1


def cmd_sim(args) -> int:
    _, rules = _load_cfg(args.config)
    if args.load:
        world = load_world(Path(args.load).read_bytes())
    else:
        pcg, _ = _load_cfg(args.config)
        pcg = dataclasses.replace(pcg, seed=seed_from_env(args.seed))
        world = gen_start_state(pcg) if args.procgen else make_world(
            1, pcg.height, pcg.width)
    for _ in range(args.ticks):
        world = step(world, rules) if rules is not None else step(world)
    for slot in range(world.batch):
        print(f"slot {slot}: tick {world.tick} "
              f"digest {world_digest(world, slot):#018x}")
    if args.save:
        Path(args.save).write_bytes(save_world(world, args.mode))
        print(f"saved to {args.save}")
    return 0


def cmd_print_config(args) -> int:
    print(format_config(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sandsim")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset",
                       help="generate world-model (start, +8 ticks) pairs")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--mode", choices=("full", "rle"), default="full")
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("bench", help="measure step throughput")
    p.add_argument("--batches", default="1,8,32")
    p.add_argument("--fills", default="empty,wall,sand,mixed")
    p.add_argument("--ticks", type=int, default=32)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("env-serve",
                       help="speak the JSON environment protocol on stdio")
    p.set_defaults(func=cmd_env_serve)

    p = sub.add_parser("sandbox-serve", help="interactive websocket sandbox")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--tick-rate", type=float, default=DEFAULT_TPS)
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--velocity", action="store_true",
                   help="include the velocity overlay in frames")
    p.set_defaults(func=cmd_sandbox_serve)

    p = sub.add_parser("eval-tests",
                       help="run the behavioural scenario suite")
    p.add_argument("--config", help="key=value config file")
    p.set_defaults(func=cmd_eval_tests)

    p = sub.add_parser("sim", help="run a headless simulation")
    p.add_argument("--ticks", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--procgen", action="store_true",
                   help="start from a generated world instead of empty")
    p.add_argument("--load", help="world file to resume from")
    p.add_argument("--save", help="world file to write at the end")
    p.add_argument("--mode", choices=("full", "rle"), default="full")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("print-config", help="print the default configuration")
    p.set_defaults(func=cmd_print_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
