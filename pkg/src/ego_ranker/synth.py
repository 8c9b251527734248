"""Synthetic traces from tiered ground-truth ego networks, and recovery metrics.

Each friend in tier k interacts with the ego as independent Poisson
processes, one per interaction type, with per-window mean
``base_rate[type] * strength_k``. Message sizes are geometric with the
configured mean and timestamps are uniform within their window.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circles import CircleLayout
from .colley import DEFAULT_TOLERANCE
from .errors import BadTierSpec, ConfigError, FriendSetMismatch
from .events import EventStream, InteractionEvent, InteractionType
from .pipeline import build_record, rank_record
from .scoring import InteractionWeights, WindowSpec

TYPES = tuple(InteractionType)
DEFAULT_EGO = "ego"


@dataclass(frozen=True)
class GroundTruth:
    ego: str
    tiers: tuple[tuple[tuple[str, ...], float], ...]
    seed: int = 0

    @property
    def friends(self) -> list[str]:
        return sorted(f for members, _ in self.tiers for f in members)

    def tier_of(self) -> dict[str, int]:
        return {f: k for k, (members, _) in enumerate(self.tiers) for f in members}

    def strength_of(self) -> dict[str, float]:
        return {f: s for members, s in self.tiers for f in members}


@dataclass(frozen=True)
class TraceConfig:
    duration_windows: int
    base_rates: Mapping[InteractionType, float] = field(
        default_factory=lambda: {
            InteractionType.FACE_TO_FACE: 0.1,
            InteractionType.VIDEO: 0.1,
            InteractionType.CALL: 0.3,
            InteractionType.MESSAGE: 0.5,
        }
    )
    mean_message_size: int = 512

    def __post_init__(self):
        rates = {InteractionType.parse(k) if isinstance(k, str) else k: float(v) for k, v in self.base_rates.items()}
        object.__setattr__(self, "base_rates", rates)
        if self.duration_windows < 0:
            raise ConfigError("duration_windows must be non-negative")
        if any(r < 0 for r in rates.values()):
            raise ConfigError("base rates must be non-negative")
        if self.mean_message_size < 1:
            raise ConfigError("mean_message_size must be a positive integer")

    def rate(self, kind: InteractionType) -> float:
        return self.base_rates.get(kind, 0.0)


@dataclass(frozen=True)
class RecoveryReport:
    kendall_tau: float
    circle_accuracy: float
    per_tier_accuracy: tuple[float, ...]
    windows_used: int

    def to_json(self) -> dict:
        return {
            "kendall_tau": self.kendall_tau,
            "circle_accuracy": self.circle_accuracy,
            "per_tier_accuracy": list(self.per_tier_accuracy),
            "windows_used": self.windows_used,
        }


def generate_truth(
    tier_sizes: Sequence[int], tier_strengths: Sequence[float], seed: int = 0, ego: str = DEFAULT_EGO
) -> GroundTruth:
    """Tiered friend set. IDs ``f000, f001, ...`` are dealt to tiers by a
    seeded shuffle so that ID order carries no information about closeness."""
    if len(tier_sizes) != len(tier_strengths) or not tier_sizes:
        raise BadTierSpec("tier sizes and strengths must be non-empty and of equal length")
    if any(int(n) != n or n < 1 for n in tier_sizes):
        raise BadTierSpec(f"tier sizes must be positive integers, got {list(tier_sizes)}")
    if any(s <= 0 for s in tier_strengths):
        raise BadTierSpec("tier strengths must be positive")
    if any(b >= a for a, b in zip(tier_strengths, tier_strengths[1:])):
        raise BadTierSpec(f"tier strengths must be strictly decreasing, got {list(tier_strengths)}")
    total = int(sum(tier_sizes))
    width = max(3, len(str(total - 1)))
    ids = [f"f{i:0{width}d}" for i in range(total)]
    if ego in ids:
        raise BadTierSpec(f"ego id {ego!r} collides with a friend id")
    order = np.random.default_rng(np.random.SeedSequence([seed, 0])).permutation(total)
    tiers, lo = [], 0
    for size, strength in zip(tier_sizes, tier_strengths):
        members = tuple(sorted(ids[i] for i in order[lo : lo + int(size)]))
        tiers.append((members, float(strength)))
        lo += int(size)
    return GroundTruth(ego, tuple(tiers), seed)


def sample_trace(truth: GroundTruth, cfg: TraceConfig, spec: WindowSpec, seed: int = 0) -> EventStream:
    friends = truth.friends
    strength = truth.strength_of()
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    n_w = cfg.duration_windows
    if n_w == 0 or not friends:
        return EventStream.from_events(())
    # lam[friend, window, type]
    lam = np.array([[cfg.rate(t) * strength[f] for t in TYPES] for f in friends])
    counts = rng.poisson(np.broadcast_to(lam[:, None, :], (len(friends), n_w, len(TYPES))))
    total = int(counts.sum())
    offsets = rng.integers(0, spec.window_length, size=total)
    msg_total = int(counts[..., TYPES.index(InteractionType.MESSAGE)].sum())
    sizes = rng.geometric(1.0 / cfg.mean_message_size, size=msg_total) if msg_total else []

    events = []
    fi, wi, ti = np.nonzero(counts)
    k = m = 0
    for f, w, t in zip(fi, wi, ti):
        kind = TYPES[t]
        start = spec.start_of(int(w))
        for _ in range(int(counts[f, w, t])):
            size = 0
            if kind is InteractionType.MESSAGE:
                size = int(sizes[m])
                m += 1
            events.append(InteractionEvent(truth.ego, friends[f], start + int(offsets[k]), kind, size))
            k += 1
    return EventStream.from_events(events)


def kendall_tau(ranking: Sequence[str], truth: GroundTruth) -> float:
    """Rank agreement with the tier order, counting only cross-tier pairs.

    Returns (concordant - discordant) / cross-tier pairs; 1.0 when no
    cross-tier pair exists.
    """
    tier = truth.tier_of()
    if len(ranking) != len(set(ranking)) or set(ranking) != set(tier):
        raise FriendSetMismatch("ranking must be a permutation of the ground-truth friends")
    # position-wise tier labels; a pair (a before b) is concordant when tier[a] < tier[b]
    labels = np.array([tier[f] for f in ranking])
    diff = labels[None, :] - labels[:, None]
    upper = np.triu_indices(len(labels), k=1)
    d = diff[upper]
    concordant = int((d > 0).sum())
    discordant = int((d < 0).sum())
    pairs = concordant + discordant
    return 1.0 if pairs == 0 else (concordant - discordant) / pairs


def evaluate(
    truth: GroundTruth,
    cfg: TraceConfig,
    spec: WindowSpec = WindowSpec(),
    weights: InteractionWeights = InteractionWeights(),
    layout: CircleLayout = CircleLayout(),
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> RecoveryReport:
    """Sample a trace, run the full pipeline on it, and score the recovery.

    All ground-truth friends are registered up front (the ego's contact
    list), so a friend who never interacts still gets a rating.
    """
    stream = sample_trace(truth, cfg, spec, seed)
    record = build_record(stream, truth.ego, spec, weights, known_friends=truth.friends)
    result, circles = rank_record(record, layout, tolerance)
    tier = truth.tier_of()
    hits = {k: 0 for k in range(len(truth.tiers))}
    for friend in result.ranking:
        if circles.circle_index(friend) == tier[friend]:
            hits[tier[friend]] += 1
    per_tier = tuple(hits[k] / len(members) for k, (members, _) in enumerate(truth.tiers))
    return RecoveryReport(
        kendall_tau=kendall_tau(result.ranking, truth),
        circle_accuracy=sum(hits.values()) / len(tier),
        per_tier_accuracy=per_tier,
        windows_used=record.windows_processed,
    )


@dataclass(frozen=True)
class Scenario:
    tier_sizes: tuple[int, ...] = (5, 10, 30)
    tier_strengths: tuple[float, ...] = (10.0, 3.0, 1.0)
    trace: TraceConfig = field(default_factory=lambda: TraceConfig(200))
    seeds: tuple[int, ...] = tuple(range(20))

    @classmethod
    def from_json(cls, doc: dict) -> "Scenario":
        allowed = {"tier_sizes", "tier_strengths", "base_rates", "windows", "mean_message_size", "seeds"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown scenario key(s): {', '.join(sorted(unknown))}")
        try:
            seeds = tuple(int(s) for s in doc.get("seeds", ()))
            default = TraceConfig(200)
            trace = TraceConfig(
                int(doc.get("windows", default.duration_windows)),
                doc.get("base_rates", default.base_rates),
                int(doc.get("mean_message_size", default.mean_message_size)),
            )
            scenario = cls(
                tuple(doc.get("tier_sizes", cls.tier_sizes)),
                tuple(float(s) for s in doc.get("tier_strengths", cls.tier_strengths)),
                trace,
                seeds,
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad scenario: {exc}") from None
        if not seeds:
            raise ConfigError("scenario lists no seeds")
        if any(s < 0 or s >= 2**64 for s in seeds):
            raise ConfigError("seeds must be unsigned 64-bit integers")
        return scenario

    def run(
        self,
        spec: WindowSpec = WindowSpec(),
        weights: InteractionWeights = InteractionWeights(),
        layout: CircleLayout = CircleLayout(),
        tolerance: float = DEFAULT_TOLERANCE,
    ) -> list[RecoveryReport]:
        """One report per seed; the seed drives both the tier deal and the trace."""
        reports = []
        for seed in self.seeds:
            truth = generate_truth(self.tier_sizes, self.tier_strengths, seed)
            reports.append(evaluate(truth, self.trace, spec, weights, layout, seed, tolerance))
        return reports


def aggregate(reports: Sequence[RecoveryReport]) -> dict:
    """Medians across seeds."""
    n_tiers = len(reports[0].per_tier_accuracy)
    return {
        "runs": len(reports),
        "median_kendall_tau": statistics.median(r.kendall_tau for r in reports),
        "median_circle_accuracy": statistics.median(r.circle_accuracy for r in reports),
        "median_per_tier_accuracy": [
            statistics.median(r.per_tier_accuracy[k] for r in reports) for k in range(n_tiers)
        ],
        "median_windows_used": statistics.median(r.windows_used for r in reports),
    }
