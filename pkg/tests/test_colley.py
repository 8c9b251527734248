import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import record_from_games
from oracles import colley_by_hand, gauss_solve, random_schedule

from ego_ranker.colley import (
    ColleySystem,
    build_system,
    laplace_rating,
    rank_friends,
    solve,
)
from ego_ranker.errors import EmptyFriendSet, UnknownFriend
from ego_ranker.tournament import TournamentRecord, play_window, register_friends


def test_oracle_sanity():
    # 2x + y = 5, x - y = 1  ->  x = 2, y = 1
    assert gauss_solve([[2, 1], [1, -1]], [5, 1]) == pytest.approx([2, 1])


class TestBuildSystem:
    def test_one_win(self):
        s = build_system(record_from_games(["b", "c"], [("b", "c", False)]))
        assert s.friends == ("b", "c")
        assert s.c.tolist() == [[3, -1], [-1, 3]]
        assert s.b.tolist() == [1.5, 0.5]

    def test_no_games(self):
        s = build_system(record_from_games(["b", "c"], []))
        assert s.c.tolist() == [[2, 0], [0, 2]]
        assert s.b.tolist() == [1, 1]

    def test_tie(self):
        s = build_system(record_from_games(["b", "c"], [("b", "c", True)]))
        assert s.c.tolist() == [[3, -1], [-1, 3]]
        assert s.b.tolist() == [1, 1]

    def test_empty(self):
        with pytest.raises(EmptyFriendSet):
            build_system(TournamentRecord("ego"))

    def test_matches_hand_built_matrix(self):
        friends, games = random_schedule(random.Random(7), 12)
        s = build_system(record_from_games(friends, games))
        c, b, _ = colley_by_hand(friends, games)
        assert s.c.tolist() == c and s.b.tolist() == b
        # strict diagonal dominance
        off = np.abs(s.c).sum(axis=1) - np.diag(s.c)
        assert (np.diag(s.c) > off).all()


class TestSolve:
    @pytest.mark.parametrize("n", [1, 2, 5, 30])
    def test_no_games_all_half(self, n):
        rec = record_from_games([f"f{i}" for i in range(n)], [])
        assert set(rank_friends(rec).ratings.values()) == {0.5}

    def test_hand_solved_two_by_two(self):
        # 3r1 - r2 = 1.5, -r1 + 3r2 = 0.5  ->  8 r1 = 5
        res = solve(ColleySystem(("b", "c"), np.array([[3.0, -1], [-1, 3]]), np.array([1.5, 0.5])))
        assert res.ratings["b"] == pytest.approx(0.625, abs=1e-12)
        assert res.ratings["c"] == pytest.approx(0.375, abs=1e-12)
        assert res.ranking == ("b", "c")
        assert res.residual <= 1e-9

    def test_single_friend(self):
        res = rank_friends(record_from_games(["b"], []))
        assert res.ranking == ("b",) and res.ratings == {"b": 0.5}

    def test_exact_tie_broken_by_lifetime_value_then_id(self):
        rec = register_friends(TournamentRecord("ego"), ["b", "c", "d"])
        # b and c tie with identical records and totals, so friend ID decides
        rec = play_window(rec, {"b": 2.0, "c": 2.0, "d": 1.0})
        assert rank_friends(rec).ranking == ("b", "c", "d")
        rec2 = register_friends(TournamentRecord("ego"), ["b", "c", "d"])
        rec2 = play_window(rec2, {"b": 2.0, "c": 2.0, "d": 1.0})
        rec2.totals[rec2.index("c")] += 1.0
        assert rank_friends(rec2).ranking == ("c", "b", "d")


@pytest.fixture(scope="module")
def random_records():
    rng = random.Random(2024)
    out = []
    for _ in range(200):
        n = rng.randint(2, 50)
        friends, games = random_schedule(rng, n, density=rng.uniform(0.05, 0.9))
        out.append((friends, games, record_from_games(friends, games)))
    return out


def test_rating_sum_identity(random_records):
    for friends, _, rec in random_records:
        res = rank_friends(rec)
        assert abs(sum(res.ratings.values()) - len(friends) / 2) <= 1e-9


def test_matches_dense_elimination_oracle(random_records):
    for friends, games, rec in random_records:
        _, _, expected = colley_by_hand(friends, games)
        res = rank_friends(rec)
        got = [res.ratings[f] for f in sorted(friends)]
        assert max(abs(g - e) for g, e in zip(got, expected)) <= 1e-8


def test_ratings_in_open_unit_interval(random_records):
    for _, _, rec in random_records:
        r = np.array(list(rank_friends(rec).ratings.values()))
        assert ((r > 0) & (r < 1)).all()


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.randoms())
def test_relabeling_permutes_ratings(n, rnd):
    friends, games = random_schedule(rnd, n)
    perm = friends[:]
    rnd.shuffle(perm)
    rename = dict(zip(friends, (f"g{p}" for p in perm)))
    r1 = rank_friends(record_from_games(friends, games)).ratings
    r2 = rank_friends(
        record_from_games(list(rename.values()), [(rename[x], rename[y], t) for x, y, t in games])
    ).ratings
    for f in friends:
        assert r2[rename[f]] == pytest.approx(r1[f], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.randoms())
def test_converting_a_loss_to_a_win_raises_rating(n, rnd):
    friends, games = random_schedule(rnd, n, density=0.8)
    losses = [k for k, (_, _, tie) in enumerate(games) if not tie]
    if not losses:
        return
    k = rnd.choice(losses)
    winner, loser, _ = games[k]
    flipped = games[:k] + [(loser, winner, False)] + games[k + 1 :]
    before = rank_friends(record_from_games(friends, games)).ratings[loser]
    after = rank_friends(record_from_games(friends, flipped)).ratings[loser]
    assert after > before


class TestLaplace:
    def test_no_games(self):
        assert laplace_rating(record_from_games(["b", "c"], []), "b") == 0.5

    def test_one_win(self):
        assert laplace_rating(record_from_games(["b", "c"], [("b", "c", False)]), "b") == pytest.approx(2 / 3)

    def test_three_wins_one_loss(self):
        games = [("b", "c", False)] * 3 + [("c", "b", False)]
        assert laplace_rating(record_from_games(["b", "c"], games), "b") == pytest.approx(4 / 6)

    def test_unknown(self):
        with pytest.raises(UnknownFriend):
            laplace_rating(record_from_games(["b"], []), "z")
