"""Per-window interaction counts and the weighted interaction value.

The value of a (friend, window) cell is

    alpha * face_to_face + beta * video + gamma * calls + delta * messages

where the message term is either a plain count (``count_only``) or a sum of
``log2(1 + size / size_ref)`` over the window's messages (``log_size``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import ConfigError, TimestampBeforeEpoch
from .events import EventStream, InteractionEvent, InteractionType

COUNT_ONLY = "count_only"
LOG_SIZE = "log_size"
SIZE_SCALINGS = (COUNT_ONLY, LOG_SIZE)

DAY = 86_400
WEEK = 7 * DAY


@dataclass(frozen=True)
class InteractionWeights:
    alpha: float = 1.0
    beta: float = 0.75
    gamma: float = 0.5
    delta: float = 0.25
    size_ref: int = 512
    size_scaling: str = COUNT_ONLY

    def __post_init__(self):
        ws = (self.alpha, self.beta, self.gamma, self.delta)
        if any(not isinstance(w, (int, float)) or isinstance(w, bool) or not math.isfinite(w) or w < 0 for w in ws):
            raise ConfigError(f"weights must be finite and non-negative, got {ws}")
        if not any(w > 0 for w in ws):
            raise ConfigError("at least one interaction weight must be positive")
        if isinstance(self.size_ref, bool) or not isinstance(self.size_ref, int) or self.size_ref < 1:
            raise ConfigError(f"size_ref must be a positive integer, got {self.size_ref!r}")
        if self.size_scaling not in SIZE_SCALINGS:
            raise ConfigError(f"size_scaling must be one of {SIZE_SCALINGS}, got {self.size_scaling!r}")

    def scaled(self, c: float) -> "InteractionWeights":
        return InteractionWeights(
            self.alpha * c, self.beta * c, self.gamma * c, self.delta * c, self.size_ref, self.size_scaling
        )


@dataclass(frozen=True)
class WindowSpec:
    window_length: int = WEEK
    epoch_start: int = 0

    def __post_init__(self):
        if isinstance(self.window_length, bool) or not isinstance(self.window_length, int) or self.window_length <= 0:
            raise ConfigError(f"window_length must be a positive integer, got {self.window_length!r}")
        if isinstance(self.epoch_start, bool) or not isinstance(self.epoch_start, int):
            raise ConfigError(f"epoch_start must be an integer, got {self.epoch_start!r}")

    @classmethod
    def for_stream(cls, stream: EventStream, window_length: int = WEEK) -> "WindowSpec":
        """Default windowing: window 0 starts at midnight UTC of the first event's day."""
        first = stream.events[0].timestamp if len(stream) else 0
        return cls(window_length, first - first % DAY)

    def start_of(self, window: int) -> int:
        return self.epoch_start + window * self.window_length


def window_of(timestamp: int, spec: WindowSpec) -> int:
    if timestamp < spec.epoch_start:
        raise TimestampBeforeEpoch(f"timestamp {timestamp} precedes epoch start {spec.epoch_start}")
    return (timestamp - spec.epoch_start) // spec.window_length


@dataclass
class WindowCounts:
    f: int = 0
    v: int = 0
    p: int = 0
    e_count: int = 0
    e_bytes: int = 0
    # individual message sizes, kept only when log_size scoring needs them
    sizes: list[int] = field(default_factory=list)

    def add(self, event: InteractionEvent, keep_sizes: bool = False) -> None:
        kind = event.itype
        if kind is InteractionType.FACE_TO_FACE:
            self.f += 1
        elif kind is InteractionType.VIDEO:
            self.v += 1
        elif kind is InteractionType.CALL:
            self.p += 1
        else:
            self.e_count += 1
            self.e_bytes += event.size
            if keep_sizes:
                self.sizes.append(event.size)

    def merge(self, other: "WindowCounts") -> "WindowCounts":
        return WindowCounts(
            self.f + other.f,
            self.v + other.v,
            self.p + other.p,
            self.e_count + other.e_count,
            self.e_bytes + other.e_bytes,
            self.sizes + other.sizes,
        )

    def is_empty(self) -> bool:
        return not (self.f or self.v or self.p or self.e_count)


def aggregate_counts(
    stream: EventStream | Iterable[InteractionEvent],
    ego: str,
    spec: WindowSpec,
    keep_sizes: bool = False,
) -> dict[tuple[str, int], WindowCounts]:
    """Bucket the ego's events into ``(friend, window) -> WindowCounts`` cells."""
    cells: dict[tuple[str, int], WindowCounts] = {}
    for event in stream:
        if ego == event.user_a:
            friend = event.user_b
        elif ego == event.user_b:
            friend = event.user_a
        else:
            continue
        key = (friend, window_of(event.timestamp, spec))
        cell = cells.get(key)
        if cell is None:
            cell = cells[key] = WindowCounts()
        cell.add(event, keep_sizes)
    return cells


def interaction_value(counts: WindowCounts, w: InteractionWeights) -> float:
    if w.size_scaling == LOG_SIZE:
        if len(counts.sizes) != counts.e_count:
            raise ValueError("log_size scoring needs per-message sizes; aggregate with keep_sizes=True")
        # sorted so the float sum does not depend on arrival order
        messages = sum(math.log2(1 + s / w.size_ref) for s in sorted(counts.sizes))
    else:
        messages = counts.e_count
    return w.alpha * counts.f + w.beta * counts.v + w.gamma * counts.p + w.delta * messages


@dataclass(frozen=True)
class InteractionValue:
    ego: str
    friend: str
    window: int
    value: float


def score_cells(
    ego: str, cells: dict[tuple[str, int], WindowCounts], w: InteractionWeights
) -> list[InteractionValue]:
    ordered = sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    return [
        InteractionValue(ego, friend, window, interaction_value(counts, w))
        for (friend, window), counts in ordered
        if not counts.is_empty()
    ]


def score_ego(
    stream: EventStream, ego: str, spec: WindowSpec, w: InteractionWeights = InteractionWeights()
) -> list[InteractionValue]:
    """Interaction values for every non-empty cell, ordered by window then friend."""
    cells = aggregate_counts(stream, ego, spec, keep_sizes=w.size_scaling == LOG_SIZE)
    return score_cells(ego, cells, w)
