"""Direct-beats requirements, their assorters, and the deduplicating pool.

A requirement DB(i, j, S) states that candidate i has more votes than j when
exactly the candidates in S remain standing.  Its assorter maps a ballot to
1 if the first standing preference is j, 0 if it is i, and 1/2 otherwise, so
the requirement holds iff the assorter mean over all cast ballots is < 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .contest import Ballot, Contest, EXHAUSTED, first_preference
from .tabulation import AltOrderSet, EliminationOrder, tally

__all__ = [
    "DBRequirement",
    "RequirementPool",
    "requirements_for_order",
    "assorter",
    "assorter_mean",
    "requirement_holds",
    "build_pool",
]


@dataclass(frozen=True)
class DBRequirement:
    i: int
    j: int
    standing: frozenset[int]

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("i and j must differ")
        if self.i not in self.standing or self.j not in self.standing:
            raise ValueError("standing set must contain both i and j")

    def key(self) -> tuple[int, int, int]:
        """(i, j, standing-bitmask): cheap hashable dedup key for C <= 64."""
        mask = 0
        for c in self.standing:
            mask |= 1 << c
        return (self.i, self.j, mask)


@dataclass(frozen=True)
class RequirementPool:
    """Deduplicated requirements plus, per alt-order, indices of its set."""

    requirements: tuple[DBRequirement, ...]
    per_order: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.requirements)


def requirements_for_order(order: EliminationOrder) -> list[DBRequirement]:
    """Complete requirement set determining each elimination in the order.

    At step k the standing set is the order's suffix from position k and the
    eliminated candidate is order[k]; every later candidate must directly
    beat it.  Yields C(C-1)/2 requirements.
    """
    C = len(order)
    out = []
    for k in range(C - 1):
        standing = frozenset(order[k:])
        for m in range(k + 1, C):
            out.append(DBRequirement(order[m], order[k], standing))
    assert len(out) == comb(C, 2)
    return out


def assorter(req: DBRequirement, ballot: Ballot) -> float:
    fp = first_preference(ballot, req.standing)
    if fp == req.j:
        return 1.0
    if fp == req.i:
        return 0.0
    return 0.5


def assorter_mean(req: DBRequirement, ballots) -> float:
    return sum(assorter(req, b) for b in ballots) / len(ballots)


def requirement_holds(req: DBRequirement, contest: Contest) -> bool:
    """True iff i strictly beats j with standing S; an exact tie fails."""
    return assorter_mean(req, contest.ballots) < 0.5


def build_pool(alt_orders: AltOrderSet) -> RequirementPool:
    """Pool the requirement sets of all alt-orders, deduplicating by
    (i, j, standing) so each base test supermartingale is tracked once."""
    if alt_orders.m == 0:
        raise ValueError("no alt-orders to pool")
    index: dict[tuple[int, int, int], int] = {}
    pooled: list[DBRequirement] = []
    per_order: list[tuple[int, ...]] = []
    for order in alt_orders.orders:
        refs = []
        for req in requirements_for_order(order):
            key = req.key()
            if key not in index:
                index[key] = len(pooled)
                pooled.append(req)
            refs.append(index[key])
        per_order.append(tuple(refs))
    return RequirementPool(tuple(pooled), tuple(per_order))
