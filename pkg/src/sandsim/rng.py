"""Counter-based random streams for reproducible batched simulation.

Every random draw in the engine is keyed by (stream, tick, rule), where the
stream is derived from (seed, slot). Because the key fully determines the
draw, a slot extracted from a batch and stepped alone consumes exactly the
same random numbers as it did inside the batch.
"""

import numpy as np

__all__ = ["mix64", "slot_streams", "rule_uniforms", "rule_generator"]

_MASK = (1 << 64) - 1


def mix64(*parts: int) -> int:
    """Combine integers into a single 64-bit value (splitmix64 finalizer)."""
    h = 0
    for p in parts:
        h = (h + (p & _MASK) + 0x9E3779B97F4A7C15) & _MASK
        h = ((h ^ (h >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        h = ((h ^ (h >> 27)) * 0x94D049BB133111EB) & _MASK
        h ^= h >> 31
    return h


def slot_streams(seed: int, batch: int) -> np.ndarray:
    """Per-slot stream identifiers derived from a global seed."""
    return np.array([mix64(seed, slot) for slot in range(batch)], dtype=np.uint64)


def rule_generator(stream: int, tick: int, rule: int) -> np.random.Generator:
    """Counter-based generator for one (stream, tick, rule) triple."""
    key = np.array([stream, mix64(tick, rule)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def rule_uniforms(streams: np.ndarray, tick: int, rule: int, h: int, w: int) -> np.ndarray:
    """Uniform [0,1) field of shape (B, h, w), one independent plane per slot.

    Slot b's plane depends only on streams[b], so batched and sequential
    execution see identical numbers.
    """
    out = np.empty((len(streams), h, w), dtype=np.float64)
    for b, stream in enumerate(streams):
        out[b] = rule_generator(int(stream), tick, rule).random((h, w))
    return out
