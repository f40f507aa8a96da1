"""IRV tabulation and enumeration of alternative elimination orders."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import factorial

from .contest import Ballot, Contest, EXHAUSTED, first_preference

__all__ = [
    "EliminationOrder",
    "EliminationResult",
    "AltOrderSet",
    "tally",
    "tabulate",
    "enumerate_alt_orders",
]

EliminationOrder = tuple[int, ...]

DEFAULT_MAX_CANDIDATES = 6


@dataclass(frozen=True)
class EliminationResult:
    """Outcome of one IRV tabulation.

    order[k] is the k-th eliminated candidate; order[-1] is the winner.
    tie_events records every round where >=2 standing candidates shared the
    minimum tally, as (round, tied ids, eliminated id).
    """

    order: EliminationOrder
    round_tallies: tuple[dict[int, int], ...]
    tie_events: tuple[tuple[int, tuple[int, ...], int], ...]

    @property
    def winner(self) -> int:
        return self.order[-1]


@dataclass(frozen=True)
class AltOrderSet:
    """All elimination orders whose winner differs from the reported winner."""

    orders: tuple[EliminationOrder, ...]
    reported_winner: int
    num_candidates: int

    @property
    def m(self) -> int:
        return len(self.orders)


def tally(ballots, standing) -> dict[int, int]:
    """Count first preferences among standing candidates; exhausted ballots
    count for no one."""
    counts = {c: 0 for c in standing}
    for b in ballots:
        fp = first_preference(b, standing)
        if fp != EXHAUSTED:
            counts[fp] += 1
    return counts


def tabulate(contest: Contest, tie_break=None) -> EliminationResult:
    """Run IRV to completion.

    tie_break is a key function giving a total order on candidate ids for
    breaking minimum-tally ties; default ascending id.  Every tie is recorded
    in tie_events regardless of how it is broken.
    """
    if tie_break is None:
        tie_break = lambda c: c
    standing = set(range(contest.num_candidates))
    order: list[int] = []
    rounds: list[dict[int, int]] = []
    ties: list[tuple[int, tuple[int, ...], int]] = []
    rnd = 0
    while len(standing) > 1:
        counts = tally(contest.ballots, standing)
        rounds.append(dict(counts))
        lowest = min(counts.values())
        tied = sorted(c for c in standing if counts[c] == lowest)
        eliminated = min(tied, key=tie_break)
        if len(tied) > 1:
            ties.append((rnd, tuple(tied), eliminated))
        standing.discard(eliminated)
        order.append(eliminated)
        rnd += 1
    order.append(standing.pop())
    return EliminationResult(tuple(order), tuple(rounds), tuple(ties))


def enumerate_alt_orders(C: int, reported_winner: int,
                         max_candidates: int = DEFAULT_MAX_CANDIDATES) -> AltOrderSet:
    """All (C-1)*(C-1)! permutations not ending in the reported winner, in
    lexicographic order.

    Tracking cost is factorial in C, so contests beyond max_candidates are
    refused rather than silently attempted.
    """
    if C < 2:
        raise ValueError("need at least two candidates")
    if C > max_candidates:
        raise ValueError(
            f"{C} candidates exceeds the supported maximum of {max_candidates}")
    if not (0 <= reported_winner < C):
        raise ValueError(f"reported_winner {reported_winner} out of range")
    orders = tuple(p for p in permutations(range(C)) if p[-1] != reported_winner)
    assert len(orders) == (C - 1) * factorial(C - 1)
    return AltOrderSet(orders, reported_winner, C)
