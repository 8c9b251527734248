import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ego_ranker.errors import CorruptState, UnknownFriend
from ego_ranker.tournament import (
    GameOutcome,
    Result,
    TournamentRecord,
    accumulate,
    play_window,
    register_friends,
    window_games,
)


def outcomes(games):
    return [(g.friend_i, g.friend_j, g.result) for g in games]


class TestWindowGames:
    def test_direct_comparison(self):
        assert outcomes(window_games({"b": 3.0, "c": 1.0}, 0)) == [("b", "c", Result.I_WINS)]

    def test_equal_values_tie(self):
        assert outcomes(window_games({"b": 2.0, "c": 2.0}, 0)) == [("b", "c", Result.TIE)]

    def test_zero_zero_pairs_skipped(self):
        # pairs: (b,c) both zero -> skipped; (b,d), (c,d) -> d wins
        games = window_games({"b": 0.0, "c": 0.0, "d": 1.0}, 4)
        assert outcomes(games) == [("b", "d", Result.J_WINS), ("c", "d", Result.J_WINS)]
        assert all(g.window == 4 for g in games)

    def test_absent_known_friend_counts_as_zero(self):
        games = window_games({"c": 1.0}, 0, friends=["b", "c"])
        assert outcomes(games) == [("b", "c", Result.J_WINS)]

    def test_non_canonical_pair_rejected(self):
        with pytest.raises(ValueError):
            GameOutcome("c", "b", 0, Result.TIE)


def fresh(*friends):
    return register_friends(TournamentRecord("ego"), friends)


class TestAccumulate:
    def test_single_win(self):
        r = accumulate(fresh("b", "c"), [GameOutcome("b", "c", 0, Result.I_WINS)])
        assert (r.n("b", "c"), r.w("b"), r.l("c"), r.t("b"), r.t("c")) == (1, 1, 1, 1, 1)
        assert r.l("b") == 0 and r.w("c") == 0

    def test_tie_split(self):
        r = accumulate(fresh("b", "c"), [GameOutcome("b", "c", 0, Result.TIE)])
        assert (r.n("b", "c"), r.w("b"), r.w("c"), r.l("b"), r.l("c")) == (1, 0.5, 0.5, 0.5, 0.5)

    def test_additivity(self):
        r = accumulate(fresh("b", "c"), [GameOutcome("b", "c", 0, Result.I_WINS)])
        r = accumulate(r, [GameOutcome("b", "c", 1, Result.J_WINS)])
        assert (r.n("b", "c"), r.w("b"), r.l("b"), r.w("c"), r.l("c")) == (2, 1, 1, 1, 1)
        assert r.windows_processed == 2

    def test_unknown_friend(self):
        with pytest.raises(UnknownFriend):
            accumulate(fresh("b"), [GameOutcome("b", "c", 0, Result.TIE)])

    def test_input_record_untouched(self):
        r0 = fresh("b", "c")
        accumulate(r0, [GameOutcome("b", "c", 0, Result.I_WINS)])
        assert r0.pair_games.sum() == 0


class TestRegister:
    def test_add_newcomer(self):
        r = accumulate(fresh("b", "c"), [GameOutcome("b", "c", 0, Result.I_WINS)])
        r = register_friends(r, ["d"])
        assert r.friends == ["b", "c", "d"]
        assert r.t("d") == 0 and r.n("b", "c") == 1 and r.w("b") == 1

    def test_idempotent(self):
        r = fresh("b", "c")
        assert register_friends(r, ["b"]) is r

    def test_empty_record(self):
        r = fresh("b")
        assert r.friends == ["b"]
        assert window_games({"b": 5.0}, 0) == []

    def test_ego_never_registered(self):
        assert fresh("ego", "b").friends == ["b"]


value_maps = st.dictionaries(
    st.sampled_from("abcdefg"), st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.5, 3.0]), max_size=7
)


@given(st.lists(value_maps, max_size=8))
def test_vectorized_window_matches_game_list(windows):
    """play_window and accumulate(window_games) must agree exactly."""
    fast = slow = TournamentRecord("ego")
    for w, values in enumerate(windows):
        fast = register_friends(fast, values)
        slow = register_friends(slow, values)
        fast = play_window(fast, values)
        slow = accumulate(slow, window_games(values, w, friends=slow.friends))
    assert np.array_equal(fast.pair_games, slow.pair_games)
    assert np.array_equal(fast.wins, slow.wins)
    assert np.array_equal(fast.losses, slow.losses)
    assert fast.windows_processed == slow.windows_processed
    fast.check()


@given(st.lists(value_maps, max_size=8), st.floats(0.01, 100))
def test_scale_free(windows, c):
    for w, values in enumerate(windows):
        scaled = {k: v * c for k, v in values.items()}
        assert outcomes(window_games(values, w)) == outcomes(window_games(scaled, w))


@settings(max_examples=50)
@given(st.lists(value_maps, min_size=1, max_size=6), st.randoms())
def test_conservation_and_order_independence(windows, rnd):
    rec = TournamentRecord("ego")
    for values in windows:
        rec = register_friends(rec, values)
    shuffled = rec
    for w, values in enumerate(windows):
        games = window_games(values, w, friends=rec.friends)
        rec = accumulate(rec, games)
        rnd.shuffle(games)
        shuffled = accumulate(shuffled, games)
    rec.check()
    assert rec.wins.sum() == rec.losses.sum()
    assert np.array_equal(rec.wins + rec.losses, rec.games_played)
    assert not np.diag(rec.pair_games).any()
    assert rec.to_json() == shuffled.to_json()


def test_snapshot_round_trip_and_ordering():
    rec = fresh("c", "a", "b")
    rec = play_window(rec, {"a": 2.0, "c": 2.0})
    rec = play_window(rec, {"b": 1.0})
    doc = rec.to_json()
    assert doc["friends"] == ["a", "b", "c"]
    assert doc["pairs"] == [["a", "b", 2], ["a", "c", 1], ["b", "c", 2]]
    assert doc["wins"] == {"a": 1.5, "b": 2.0, "c": 1.5}
    again = TournamentRecord.from_json(json.loads(json.dumps(doc)))
    assert again.to_json() == doc


def test_corrupt_snapshot_detected():
    doc = play_window(fresh("a", "b"), {"a": 1.0}).to_json()
    doc["wins"]["a"] = 5.0
    with pytest.raises(CorruptState):
        TournamentRecord.from_json(doc)


def test_totals_accumulate_values():
    rec = play_window(fresh("a", "b"), {"a": 1.5})
    rec = play_window(rec, {"a": 0.5, "b": 2.0})
    assert rec.total_value("a") == 2.0 and rec.total_value("b") == 2.0
