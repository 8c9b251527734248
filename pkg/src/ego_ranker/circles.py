"""Partition a ranking into nested Dunbar circles.

Bounds are cumulative: with the default ``(5, 15, 45, 135)`` the innermost
circle holds ranks 1-5, the next ranks 6-15, and so on. Friends ranked past
the last bound go to ``overflow`` instead of being dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigError, DuplicateFriend

DEFAULT_BOUNDS = (5, 15, 45, 135)


@dataclass(frozen=True)
class CircleLayout:
    cumulative_bounds: tuple[int, ...] = DEFAULT_BOUNDS

    def __post_init__(self):
        bounds = tuple(self.cumulative_bounds)
        object.__setattr__(self, "cumulative_bounds", bounds)
        if not bounds:
            raise ConfigError("circle layout needs at least one bound")
        if any(isinstance(b, bool) or not isinstance(b, int) for b in bounds):
            raise ConfigError(f"circle bounds must be integers, got {bounds}")
        if bounds[0] < 1 or any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise ConfigError(f"circle bounds must be positive and strictly increasing, got {bounds}")

    @property
    def capacities(self) -> list[int]:
        prev = (0,) + self.cumulative_bounds[:-1]
        return [b - p for b, p in zip(self.cumulative_bounds, prev)]

    def __len__(self) -> int:
        return len(self.cumulative_bounds)


@dataclass(frozen=True)
class CircleAssignment:
    ego: str
    circles: tuple[tuple[str, ...], ...]
    overflow: tuple[str, ...] = ()

    def circle_index(self, friend: str) -> int:
        """Circle of ``friend``; overflow is reported as ``len(circles)``."""
        for k, members in enumerate(self.circles):
            if friend in members:
                return k
        if friend in self.overflow:
            return len(self.circles)
        raise KeyError(friend)

    def to_json(self) -> dict:
        return {"ego": self.ego, "circles": [list(c) for c in self.circles], "overflow": list(self.overflow)}

    @classmethod
    def from_json(cls, doc: dict) -> "CircleAssignment":
        return cls(doc["ego"], tuple(tuple(c) for c in doc["circles"]), tuple(doc["overflow"]))


def circle_of(rank: int, layout: CircleLayout = CircleLayout()) -> Optional[int]:
    """Index of the circle holding 1-based ``rank``; ``None`` means overflow."""
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    for k, bound in enumerate(layout.cumulative_bounds):
        if rank <= bound:
            return k
    return None


def assign_circles(ranking: Sequence[str], layout: CircleLayout = CircleLayout(), ego: str = "") -> CircleAssignment:
    seen = set()
    for friend in ranking:
        if friend in seen:
            raise DuplicateFriend(f"{friend!r} appears more than once in the ranking")
        seen.add(friend)
    circles = []
    lo = 0
    for bound in layout.cumulative_bounds:
        circles.append(tuple(ranking[lo:bound]))
        lo = bound
    return CircleAssignment(ego, tuple(circles), tuple(ranking[lo:]))
