"""Colley ratings of an ego's friends.

The rating vector r solves C r = b with

    C[i][i] = 2 + t_i,   C[i][j] = -n_ij,   b[i] = 1 + (w_i - l_i) / 2

C is strictly diagonally dominant with a positive diagonal, hence symmetric
positive definite, so a Cholesky factorization always succeeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import EmptyFriendSet, SolveFailure
from .tournament import TournamentRecord

DEFAULT_TOLERANCE = 1e-9
# ratings equal to this many decimals count as tied for ranking purposes
TIE_DECIMALS = 10


@dataclass(frozen=True)
class ColleySystem:
    friends: tuple[str, ...]
    c: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class RatingResult:
    ego: str
    ratings: dict[str, float]
    ranking: tuple[str, ...]
    residual: float

    def to_json(self) -> dict:
        return {
            "ego": self.ego,
            "ratings": [{"friend": f, "rating": self.ratings[f]} for f in self.ranking],
            "residual": self.residual,
        }


def build_system(record: TournamentRecord) -> ColleySystem:
    if not len(record):
        raise EmptyFriendSet(f"ego {record.ego!r} has no friends to rate")
    games = record.pair_games.astype(np.float64)
    c = -games
    c[np.diag_indices_from(c)] = 2.0 + games.sum(axis=1)
    b = 1.0 + (record.wins - record.losses) / 2.0
    return ColleySystem(tuple(record.friends), c, b)


def _residual(system: ColleySystem, r: np.ndarray) -> float:
    return float(np.max(np.abs(system.c @ r - system.b))) if len(r) else 0.0


def solve_ratings(system: ColleySystem, tolerance: float = DEFAULT_TOLERANCE) -> tuple[np.ndarray, float]:
    """Solve the system; returns ``(ratings, residual_inf_norm)``."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    c, b = system.c, system.b
    # friends with no games form 1x1 blocks; dividing keeps their rating exact
    coupled = (c - np.diag(np.diag(c)) != 0).any(axis=1)
    r = b / np.diag(c)
    if coupled.any():
        sub = np.ix_(coupled, coupled)
        try:
            factor = cho_factor(c[sub], lower=True, check_finite=True)
        except np.linalg.LinAlgError as exc:
            raise SolveFailure(f"Colley matrix is not positive definite: {exc}") from None
        r[coupled] = cho_solve(factor, b[coupled])
    res = _residual(system, r)
    if res > tolerance and coupled.any():
        # one step of iterative refinement for large game counts
        r[coupled] += cho_solve(factor, (b - c @ r)[coupled])
        res = _residual(system, r)
    if not res <= tolerance:
        raise SolveFailure(f"residual {res:.3e} exceeds tolerance {tolerance:.1e}")
    return r, res


def order_friends(friends, ratings, totals) -> tuple[str, ...]:
    """Best first: higher rating, then higher lifetime interaction value, then friend ID."""
    keys = sorted(
        range(len(friends)),
        key=lambda i: (-round(float(ratings[i]), TIE_DECIMALS), -float(totals[i]), friends[i]),
    )
    return tuple(friends[i] for i in keys)


def solve(system: ColleySystem, tolerance: float = DEFAULT_TOLERANCE, totals=None, ego: str = "") -> RatingResult:
    r, res = solve_ratings(system, tolerance)
    if totals is None:
        totals = np.zeros(len(r))
    ranking = order_friends(system.friends, r, totals)
    return RatingResult(ego, {f: float(x) for f, x in zip(system.friends, r)}, ranking, res)


def rank_friends(record: TournamentRecord, tolerance: float = DEFAULT_TOLERANCE) -> RatingResult:
    return solve(build_system(record), tolerance, totals=record.totals, ego=record.ego)


def laplace_rating(record: TournamentRecord, friend: str) -> float:
    """Win fraction with a uniform prior: (1 + w_i) / (2 + t_i), ties counted as half wins."""
    i = record.index(friend)
    return (1.0 + float(record.wins[i])) / (2.0 + float(record.pair_games[i].sum()))
