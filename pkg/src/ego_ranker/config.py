"""Run configuration: one JSON file, every key optional, unknown keys rejected."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .circles import CircleLayout
from .colley import DEFAULT_TOLERANCE
from .errors import ConfigError
from .events import EventStream
from .scoring import WEEK, InteractionWeights, WindowSpec

STATE_ENV = "EGO_RANKER_STATE"
DEFAULT_STATE_DIR = ".ego_ranker_state"

_SECTIONS = {
    "weights": {"alpha", "beta", "gamma", "delta", "size_scaling", "size_ref"},
    "window": {"length_seconds", "epoch_start"},
    "circles": {"bounds"},
    "solver": {"tolerance"},
    "state_dir": None,
}


@dataclass(frozen=True)
class RunConfig:
    weights: InteractionWeights = field(default_factory=InteractionWeights)
    window_length: int = WEEK
    # None: derive from the first event (midnight UTC of its day)
    epoch_start: Optional[int] = None
    layout: CircleLayout = field(default_factory=CircleLayout)
    tolerance: float = DEFAULT_TOLERANCE
    state_dir: Path = Path(DEFAULT_STATE_DIR)

    def __post_init__(self):
        if not isinstance(self.tolerance, (int, float)) or isinstance(self.tolerance, bool) or not self.tolerance > 0:
            raise ConfigError(f"solver tolerance must be positive, got {self.tolerance!r}")
        WindowSpec(self.window_length, self.epoch_start or 0)

    def window_spec(self, stream: EventStream | None = None) -> WindowSpec:
        if self.epoch_start is not None:
            return WindowSpec(self.window_length, self.epoch_start)
        return WindowSpec.for_stream(stream or EventStream(), self.window_length)

    @classmethod
    def from_dict(cls, doc: dict, env=None) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        for section, keys in _SECTIONS.items():
            if keys is None or section not in doc:
                continue
            if not isinstance(doc[section], dict):
                raise ConfigError(f"config section {section!r} must be an object")
            bad = set(doc[section]) - keys
            if bad:
                raise ConfigError(f"unknown key(s) in {section!r}: {', '.join(sorted(bad))}")

        w = doc.get("weights", {})
        win = doc.get("window", {})
        kwargs = {}
        try:
            kwargs["weights"] = InteractionWeights(**w)
            if "length_seconds" in win:
                kwargs["window_length"] = win["length_seconds"]
            if "epoch_start" in win:
                kwargs["epoch_start"] = win["epoch_start"]
            if "bounds" in doc.get("circles", {}):
                kwargs["layout"] = CircleLayout(tuple(doc["circles"]["bounds"]))
            if "tolerance" in doc.get("solver", {}):
                kwargs["tolerance"] = doc["solver"]["tolerance"]
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        env = os.environ if env is None else env
        state_dir = env.get(STATE_ENV) or doc.get("state_dir") or DEFAULT_STATE_DIR
        if not isinstance(state_dir, str):
            raise ConfigError("state_dir must be a string path")
        return cls(state_dir=Path(state_dir), **kwargs)

    @classmethod
    def load(cls, path=None, env=None) -> "RunConfig":
        if path is None:
            return cls.from_dict({}, env)
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from None
        return cls.from_dict(doc, env)
