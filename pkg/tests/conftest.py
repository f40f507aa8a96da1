import numpy as np
import pytest

from awaire.contest import Candidate, Contest
from awaire.tabulation import tabulate


def make_contest(ballots, C, reported_winner=None):
    """Contest over candidates A, B, C, ... from raw ballot tuples."""
    ballots = tuple(tuple(b) for b in ballots)
    names = [chr(ord("A") + i) for i in range(C)]
    contest = Contest(tuple(Candidate(i, n) for i, n in enumerate(names)),
                      ballots, 0)
    if reported_winner is None:
        reported_winner = tabulate(contest).winner
    return Contest(contest.candidates, ballots, reported_winner)


def random_contest(rng, C, B, require_no_ties=False, max_tries=200):
    """Random contest of partial ballots; optionally rejected until the IRV
    tabulation hits no minimum-tally ties."""
    for _ in range(max_tries):
        ballots = []
        for _ in range(B):
            k = int(rng.integers(0, C + 1))
            ballots.append(tuple(rng.permutation(C)[:k].tolist()))
        contest = make_contest(ballots, C)
        if not require_no_ties or not tabulate(contest).tie_events:
            return contest
    raise RuntimeError("could not generate a tie-free contest")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
