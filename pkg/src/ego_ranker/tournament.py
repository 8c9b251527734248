"""Pairwise win/loss bookkeeping among an ego's friends.

In every window each pair of known friends is compared by interaction
value: the larger value wins, equal non-zero values tie (half a win and half
a loss each), and pairs where both values are zero play no game.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CorruptState, UnknownFriend


class Result(str, enum.Enum):
    I_WINS = "i_wins"
    J_WINS = "j_wins"
    TIE = "tie"


@dataclass(frozen=True)
class GameOutcome:
    friend_i: str
    friend_j: str
    window: int
    result: Result

    def __post_init__(self):
        if not self.friend_i < self.friend_j:
            raise ValueError(f"game pair must be canonical, got ({self.friend_i!r}, {self.friend_j!r})")


def window_games(values: Mapping[str, float], window: int, friends: Iterable[str] | None = None) -> list[GameOutcome]:
    """All games played in one window, ordered by canonical pair.

    ``friends`` lists every currently known friend; those missing from
    ``values`` count as zero.
    """
    names = sorted(set(values) | set(friends or ()))
    vals = [values.get(n, 0.0) for n in names]
    games = []
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            va, vb = vals[a], vals[b]
            if va == 0 and vb == 0:
                continue
            if va > vb:
                res = Result.I_WINS
            elif vb > va:
                res = Result.J_WINS
            else:
                res = Result.TIE
            games.append(GameOutcome(names[a], names[b], window, res))
    return games


def _empty_f():
    return np.zeros(0, dtype=np.float64)


@dataclass(eq=False)
class TournamentRecord:
    """Running comparison statistics for one ego.

    Arrays are indexed by ``friends``, which is kept sorted. ``totals`` holds
    each friend's lifetime summed interaction value, used only to break
    exact rating ties. Treat instances as immutable; the update functions
    return new records.
    """

    ego: str
    friends: list[str] = field(default_factory=list)
    pair_games: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))
    wins: np.ndarray = field(default_factory=_empty_f)
    losses: np.ndarray = field(default_factory=_empty_f)
    totals: np.ndarray = field(default_factory=_empty_f)
    windows_processed: int = 0

    def __post_init__(self):
        self._index = {f: i for i, f in enumerate(self.friends)}

    def __len__(self) -> int:
        return len(self.friends)

    def index(self, friend: str) -> int:
        try:
            return self._index[friend]
        except KeyError:
            raise UnknownFriend(f"{friend!r} is not a friend of {self.ego!r}") from None

    def __contains__(self, friend: str) -> bool:
        return friend in self._index

    @property
    def games_played(self) -> np.ndarray:
        """t_i: total comparisons per friend."""
        return self.pair_games.sum(axis=1)

    def n(self, i: str, j: str) -> int:
        return int(self.pair_games[self.index(i), self.index(j)])

    def t(self, friend: str) -> int:
        return int(self.pair_games[self.index(friend)].sum())

    def w(self, friend: str) -> float:
        return float(self.wins[self.index(friend)])

    def l(self, friend: str) -> float:  # noqa: E743
        return float(self.losses[self.index(friend)])

    def total_value(self, friend: str) -> float:
        return float(self.totals[self.index(friend)])

    def copy(self) -> "TournamentRecord":
        return replace(
            self,
            friends=list(self.friends),
            pair_games=self.pair_games.copy(),
            wins=self.wins.copy(),
            losses=self.losses.copy(),
            totals=self.totals.copy(),
        )

    def check(self) -> None:
        """Raise CorruptState if any bookkeeping invariant is violated."""
        n = len(self.friends)
        if self.friends != sorted(set(self.friends)):
            raise CorruptState("friends must be sorted and unique")
        shapes = (self.pair_games.shape, self.wins.shape, self.losses.shape, self.totals.shape)
        if shapes != ((n, n), (n,), (n,), (n,)):
            raise CorruptState(f"array shapes {shapes} do not match {n} friends")
        if (self.pair_games != self.pair_games.T).any() or np.diag(self.pair_games).any():
            raise CorruptState("pair_games must be symmetric with a zero diagonal")
        if (self.pair_games < 0).any() or (self.wins < 0).any() or (self.losses < 0).any():
            raise CorruptState("negative game statistics")
        if not np.array_equal(self.wins + self.losses, self.games_played.astype(np.float64)):
            raise CorruptState("w_i + l_i != t_i")
        if self.wins.sum() != self.losses.sum():
            raise CorruptState("total wins != total losses")

    # serialization -------------------------------------------------------

    def to_json(self) -> dict:
        pairs = [
            [self.friends[i], self.friends[j], int(self.pair_games[i, j])]
            for i in range(len(self.friends))
            for j in range(i + 1, len(self.friends))
            if self.pair_games[i, j]
        ]
        return {
            "ego": self.ego,
            "friends": list(self.friends),
            "pairs": pairs,
            "wins": {f: float(x) for f, x in zip(self.friends, self.wins)},
            "losses": {f: float(x) for f, x in zip(self.friends, self.losses)},
            "totals": {f: float(x) for f, x in zip(self.friends, self.totals)},
            "windows_processed": self.windows_processed,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TournamentRecord":
        try:
            friends = sorted(doc["friends"])
            idx = {f: i for i, f in enumerate(friends)}
            n = len(friends)
            games = np.zeros((n, n), dtype=np.int64)
            for i, j, count in doc["pairs"]:
                games[idx[i], idx[j]] = games[idx[j], idx[i]] = count
            rec = cls(
                ego=doc["ego"],
                friends=friends,
                pair_games=games,
                wins=np.array([doc["wins"][f] for f in friends], dtype=np.float64),
                losses=np.array([doc["losses"][f] for f in friends], dtype=np.float64),
                totals=np.array([doc.get("totals", {}).get(f, 0.0) for f in friends], dtype=np.float64),
                windows_processed=int(doc["windows_processed"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptState(f"malformed tournament record: {exc!r}") from None
        rec.check()
        return rec


def register_friends(record: TournamentRecord, new_friends: Iterable[str]) -> TournamentRecord:
    """Add unseen friends with zero statistics. Known friends are left alone."""
    added = set(new_friends) - set(record.friends) - {record.ego}
    if not added:
        return record
    friends = sorted(set(record.friends) | added)
    n = len(friends)
    pos = {f: i for i, f in enumerate(friends)}
    old = np.array([pos[f] for f in record.friends], dtype=np.intp)
    games = np.zeros((n, n), dtype=np.int64)
    games[np.ix_(old, old)] = record.pair_games
    arrays = []
    for src in (record.wins, record.losses, record.totals):
        dst = np.zeros(n, dtype=np.float64)
        dst[old] = src
        arrays.append(dst)
    return TournamentRecord(record.ego, friends, games, *arrays, windows_processed=record.windows_processed)


def accumulate(record: TournamentRecord, games: Sequence[GameOutcome]) -> TournamentRecord:
    """Fold a batch of games into a copy of ``record``."""
    out = record.copy()
    for g in games:
        i, j = out.index(g.friend_i), out.index(g.friend_j)
        out.pair_games[i, j] += 1
        out.pair_games[j, i] += 1
        if g.result is Result.I_WINS:
            out.wins[i] += 1
            out.losses[j] += 1
        elif g.result is Result.J_WINS:
            out.wins[j] += 1
            out.losses[i] += 1
        else:
            out.wins[i] += 0.5
            out.wins[j] += 0.5
            out.losses[i] += 0.5
            out.losses[j] += 0.5
    out.windows_processed += len({g.window for g in games})
    return out


def play_window(record: TournamentRecord, values: Mapping[str, float]) -> TournamentRecord:
    """Vectorized equivalent of ``accumulate(record, window_games(values, w))``
    that also adds each friend's value to its lifetime total.

    Every key of ``values`` must already be registered.
    """
    v = np.zeros(len(record), dtype=np.float64)
    for friend, value in values.items():
        v[record.index(friend)] = value
    out = record.copy()
    if not (v > 0).any():
        return out
    active = v > 0
    played = active[:, None] | active[None, :]
    np.fill_diagonal(played, False)
    beats = v[:, None] > v[None, :]
    ties = (v[:, None] == v[None, :]) & played
    n_ties = ties.sum(axis=1)
    out.pair_games += played
    out.wins += beats.sum(axis=1) + 0.5 * n_ties
    out.losses += beats.sum(axis=0) + 0.5 * n_ties
    out.totals += v
    if played.any():
        out.windows_processed += 1
    return out
