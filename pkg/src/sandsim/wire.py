"""Line-delimited JSON protocol for driving one environment over stdio.

Requests (one JSON object per line; unknown fields are ignored):

    {"op": "reset", "kind": "sand_pushing", "seed": 3,
     "params": {"max_lines": 2}, "obs_mode": "rle"}
    {"op": "step", "action": {"x": 4, "y": 5, "element": 14,
                              "vx": 2.0, "vy": 0.2857142857142858}}
    {"op": "observe"}

Responses:

    {"ok": true, "obs": {...}, "reward": 0.0, "done": false, "tick": 1}
    {"ok": false, "error": {"code": "rejected_action", "message": "..."}}

Observations carry {"shape": [H, W, 20]} plus either "b64" (base64 of the
little-endian float32 tensor) or "rle" ([count, element] pairs over the
row-major element grid). The session holds one environment at a time; a
transcript of requests replays to byte-identical responses.
"""

import base64
import dataclasses
import json
import sys

import numpy as np

from .config import ConfigError, seed_from_env
from .elements import N_ELEMENTS
from .procgen import PcgParams
from .tasks import (
    Action,
    EpisodeDoneError,
    RejectedActionError,
    env_observe,
    env_reset,
    env_step,
)

__all__ = ["EnvSession", "serve_stdio", "encode_obs"]

_ACTION_FIELDS = {f.name for f in dataclasses.fields(Action)}


def encode_obs(obs: np.ndarray, mode: str) -> dict:
    """Pack a (H, W, 20) observation for the wire."""
    payload = {"shape": list(obs.shape)}
    if mode == "b64":
        payload["b64"] = base64.b64encode(obs.astype("<f4").tobytes()).decode("ascii")
    else:
        elem = np.argmax(obs[:, :, :N_ELEMENTS], axis=-1).astype(np.uint8).ravel()
        pairs = []
        edges = np.flatnonzero(np.diff(elem)) + 1
        starts = np.concatenate(([0], edges))
        ends = np.concatenate((edges, [len(elem)]))
        for s, e in zip(starts, ends):
            pairs.append([int(e - s), int(elem[s])])
        payload["rle"] = pairs
    return payload


class EnvSession:
    """One environment, driven by JSON request dicts."""

    def __init__(self):
        self.state = None
        self.obs_mode = "b64"

    def handle(self, request: dict) -> dict:
        try:
            op = request.get("op")
            if op == "reset":
                return self._reset(request)
            if op == "step":
                return self._step(request)
            if op == "observe":
                return self._observe()
            return _error("bad_request", f"unknown op {op!r}")
        except RejectedActionError as exc:
            return _error("rejected_action", str(exc))
        except EpisodeDoneError as exc:
            return _error("episode_done", str(exc))
        except (ConfigError, TypeError, ValueError, KeyError) as exc:
            return _error("bad_request", str(exc))

    def _reset(self, request: dict) -> dict:
        kind = request.get("kind")
        if kind is None:
            return _error("bad_request", "reset requires 'kind'")
        mode = request.get("obs_mode", "b64")
        if mode not in ("b64", "rle"):
            return _error("bad_request", f"unknown obs_mode {mode!r}")
        raw = request.get("params", {})
        known = {f.name for f in dataclasses.fields(PcgParams)}
        params = PcgParams(**{k: _tupled(k, v) for k, v in raw.items() if k in known})
        seed = seed_from_env(int(request.get("seed", 0)))
        self.state, obs = env_reset(kind, params, seed)
        self.obs_mode = mode
        return {"ok": True, "obs": encode_obs(obs, mode), "reward": 0.0,
                "done": False, "tick": 0}

    def _step(self, request: dict) -> dict:
        if self.state is None:
            return _error("no_episode", "reset before stepping")
        raw = request.get("action")
        action = None
        if raw is not None:
            action = Action(**{k: v for k, v in raw.items() if k in _ACTION_FIELDS})
        self.state, obs, reward, done = env_step(self.state, action)
        return {"ok": True, "obs": encode_obs(obs, self.obs_mode),
                "reward": float(reward), "done": done, "tick": self.state.tick}

    def _observe(self) -> dict:
        if self.state is None:
            return _error("no_episode", "reset before observing")
        obs = env_observe(self.state)
        return {"ok": True, "obs": encode_obs(obs, self.obs_mode),
                "reward": 0.0, "done": self.state.done, "tick": self.state.tick}


def _tupled(key: str, value):
    # JSON has no tuples; PcgParams validation expects them for ranges.
    template = getattr(PcgParams(), key)
    if isinstance(template, tuple) and isinstance(value, list):
        return tuple(value)
    return value


def _error(code: str, message: str) -> dict:
    return {"ok": False, "error": {"code": code, "message": message}}


def serve_stdio(stdin=None, stdout=None) -> None:
    """Read requests line by line until EOF, writing one response per line."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = EnvSession()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be a JSON object")
        except ValueError as exc:
            response = _error("bad_request", f"invalid JSON: {exc}")
        else:
            response = session.handle(request)
        stdout.write(json.dumps(response, sort_keys=True) + "\n")
        stdout.flush()
