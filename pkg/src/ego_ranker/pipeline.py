"""End-to-end ranking of one ego: score, compare, rate, and layer."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping

from .circles import CircleAssignment, CircleLayout, assign_circles
from .colley import DEFAULT_TOLERANCE, RatingResult, rank_friends
from .events import EventStream
from .scoring import LOG_SIZE, InteractionWeights, WindowCounts, WindowSpec, aggregate_counts, interaction_value
from .tournament import TournamentRecord, play_window, register_friends


def fold_cells(
    record: TournamentRecord,
    cells: Mapping[tuple[str, int], WindowCounts],
    weights: InteractionWeights,
) -> TournamentRecord:
    """Play every window present in ``cells`` in ascending order.

    Friends are registered in the first window they appear in and take
    part in games from that window on.
    """
    by_window: dict[int, dict[str, WindowCounts]] = defaultdict(dict)
    for (friend, window), counts in cells.items():
        by_window[window][friend] = counts
    for window in sorted(by_window):
        row = by_window[window]
        record = register_friends(record, row)
        values = {f: interaction_value(c, weights) for f, c in sorted(row.items())}
        record = play_window(record, values)
    return record


def build_record(
    stream: EventStream,
    ego: str,
    spec: WindowSpec,
    weights: InteractionWeights = InteractionWeights(),
    known_friends: Iterable[str] = (),
) -> TournamentRecord:
    """Tournament record for ``ego`` over the whole stream.

    ``known_friends`` are registered before the first window, as if taken
    from a contact list.
    """
    record = register_friends(TournamentRecord(ego), known_friends)
    cells = aggregate_counts(stream, ego, spec, keep_sizes=weights.size_scaling == LOG_SIZE)
    return fold_cells(record, cells, weights)


def rank_record(
    record: TournamentRecord,
    layout: CircleLayout = CircleLayout(),
    tolerance: float = DEFAULT_TOLERANCE,
) -> tuple[RatingResult, CircleAssignment]:
    result = rank_friends(record, tolerance)
    return result, assign_circles(result.ranking, layout, ego=record.ego)


def rank_ego(
    stream: EventStream,
    ego: str,
    spec: WindowSpec | None = None,
    weights: InteractionWeights = InteractionWeights(),
    layout: CircleLayout = CircleLayout(),
    tolerance: float = DEFAULT_TOLERANCE,
) -> tuple[RatingResult, CircleAssignment]:
    if spec is None:
        spec = WindowSpec.for_stream(stream)
    return rank_record(build_record(stream, ego, spec, weights), layout, tolerance)
