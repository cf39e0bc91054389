"""Transition records and their line-delimited JSON serialization.

One transition per line, keys in fixed order; floats use Python's shortest
round-trip repr, so files are byte-stable across runs and decode losslessly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence


class TrajectoryFormatError(ValueError):
    """A trajectory file line does not match the documented schema."""


@dataclass
class Transition:
    obs: Sequence[float]
    action: int
    reward: float
    next_obs: Sequence[float]
    truncated: bool


def transition_to_line(tr: Transition) -> str:
    payload = {
        "obs": [float(x) for x in tr.obs],
        "action": int(tr.action),
        "reward": float(tr.reward),
        "next_obs": [float(x) for x in tr.next_obs],
        "truncated": bool(tr.truncated),
    }
    return json.dumps(payload)


def transition_from_line(line: str, obs_size: int) -> Transition:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TrajectoryFormatError(f"unparseable transition line: {exc}") from exc
    if not isinstance(payload, dict):
        raise TrajectoryFormatError("transition line is not a JSON object")
    missing = [k for k in ("obs", "action", "reward", "next_obs", "truncated") if k not in payload]
    if missing:
        raise TrajectoryFormatError(f"transition line missing key(s): {', '.join(missing)}")
    obs = payload["obs"]
    next_obs = payload["next_obs"]
    for name, vec in (("obs", obs), ("next_obs", next_obs)):
        if not isinstance(vec, list) or len(vec) != obs_size:
            raise TrajectoryFormatError(f"{name} must be a list of {obs_size} numbers")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in vec):
            raise TrajectoryFormatError(f"{name} contains a non-numeric entry")
    if payload["action"] not in (0, 1):
        raise TrajectoryFormatError(f"action must be 0 or 1, got {payload['action']!r}")
    if not isinstance(payload["reward"], (int, float)) or isinstance(payload["reward"], bool):
        raise TrajectoryFormatError("reward must be a number")
    if not isinstance(payload["truncated"], bool):
        raise TrajectoryFormatError("truncated must be a boolean")
    return Transition(
        obs=[float(x) for x in obs],
        action=int(payload["action"]),
        reward=float(payload["reward"]),
        next_obs=[float(x) for x in next_obs],
        truncated=payload["truncated"],
    )


def write_transitions(path: str | Path, transitions: Iterable[Transition]) -> None:
    lines = [transition_to_line(tr) for tr in transitions]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_transitions(path: str | Path, obs_size: int) -> list[Transition]:
    text = Path(path).read_text(encoding="utf-8")
    return [transition_from_line(line, obs_size) for line in text.splitlines() if line]


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
