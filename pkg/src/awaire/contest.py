"""Ballot and contest data model, file ingestion, and synthetic contest generation.

Candidates are integer indices 0..C-1 assigned at parse time; all downstream
math works on indices.  A ballot is an ordered tuple of distinct candidate
ids, possibly partial or empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "EXHAUSTED",
    "Candidate",
    "Ballot",
    "Contest",
    "BallotFileError",
    "parse_ballot_file",
    "serialize_ballot_file",
    "first_preference",
    "generate_pathological",
]

# Sentinel returned by first_preference when a ballot has no standing candidate.
EXHAUSTED = -1


class BallotFileError(ValueError):
    """Raised for malformed ballot files."""


@dataclass(frozen=True)
class Candidate:
    id: int
    name: str


Ballot = tuple[int, ...]


@dataclass(frozen=True)
class Contest:
    """A finite ballot population with a reported winner.

    Immutable after construction; safe to share across concurrent workers.
    """

    candidates: tuple[Candidate, ...]
    ballots: tuple[Ballot, ...]
    reported_winner: int

    def __post_init__(self):
        C = len(self.candidates)
        if len(self.ballots) < 1:
            raise ValueError("contest must have at least one ballot")
        if not (0 <= self.reported_winner < C):
            raise ValueError(f"reported_winner {self.reported_winner} out of range")
        names = [c.name for c in self.candidates]
        if len(set(names)) != len(names):
            raise ValueError("candidate names must be unique")
        for k, c in enumerate(self.candidates):
            if c.id != k:
                raise ValueError("candidate ids must be contiguous 0..C-1")
        for b in self.ballots:
            if len(set(b)) != len(b):
                raise ValueError(f"duplicate candidate in ballot {b}")
            for cid in b:
                if not (0 <= cid < C):
                    raise ValueError(f"unknown candidate id {cid} in ballot")

    @property
    def num_candidates(self) -> int:
        return len(self.candidates)

    @property
    def num_ballots(self) -> int:
        return len(self.ballots)

    def candidate_names(self) -> list[str]:
        return [c.name for c in self.candidates]


def first_preference(ballot: Ballot, standing) -> int:
    """First candidate on the ballot still standing, or EXHAUSTED.

    Eliminated candidates are skipped as if they did not appear on the ballot.
    """
    for cid in ballot:
        if cid in standing:
            return cid
    return EXHAUSTED


def _parse_ranking(text: str, name_to_id: dict[str, int], roster_fixed: bool,
                   names: list[str], lineno: int) -> Ballot:
    text = text.strip()
    if not text:
        return ()
    ranking = []
    seen = set()
    for token in text.split(">"):
        name = token.strip()
        if not name:
            raise BallotFileError(f"line {lineno}: empty candidate name in ranking")
        if name not in name_to_id:
            if roster_fixed:
                raise BallotFileError(f"line {lineno}: unknown candidate {name!r}")
            name_to_id[name] = len(names)
            names.append(name)
        cid = name_to_id[name]
        if cid in seen:
            raise BallotFileError(f"line {lineno}: duplicate candidate {name!r} in ranking")
        seen.add(cid)
        ranking.append(cid)
    return tuple(ranking)


def parse_ballot_file(data: bytes, format: str = "csv_ranks",
                      reported_winner: str | None = None) -> Contest:
    """Parse a ballot file into a Contest.

    csv_ranks: one ballot per line, candidates separated by ``>``; an optional
    first line ``# candidates: A,B,...`` declares the roster and its order; a
    blank line is a blank ballot.  aggregated_csv: ``ranking,count`` rows whose
    count-k rows expand to k identical ballots in place.

    Candidate names not declared in a header are discovered in order of first
    appearance.  The reported winner defaults to the IRV winner of the parsed
    ballots (ties broken by ascending id) unless a name is given.
    """
    if format not in ("csv_ranks", "aggregated_csv"):
        raise ValueError(f"unknown ballot file format {format!r}")
    text = data.decode("utf-8")
    if text == "":
        raise BallotFileError("empty ballot file")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline does not add a blank ballot
    if not lines:
        raise BallotFileError("empty ballot file")

    names: list[str] = []
    name_to_id: dict[str, int] = {}
    roster_fixed = False
    start = 0
    if lines[0].startswith("# candidates:"):
        roster = lines[0][len("# candidates:"):]
        for token in roster.split(","):
            name = token.strip()
            if not name:
                raise BallotFileError("empty candidate name in roster header")
            if name in name_to_id:
                raise BallotFileError(f"duplicate candidate {name!r} in roster header")
            name_to_id[name] = len(names)
            names.append(name)
        roster_fixed = True
        start = 1

    ballots: list[Ballot] = []
    for k, line in enumerate(lines[start:], start=start + 1):
        if format == "csv_ranks":
            ballots.append(_parse_ranking(line, name_to_id, roster_fixed, names, k))
        else:
            line_s = line.strip()
            if not line_s:
                continue
            ranking_part, sep, count_part = line_s.rpartition(",")
            if not sep:
                raise BallotFileError(f"line {k}: aggregated row needs a count column")
            try:
                count = int(count_part.strip())
            except ValueError:
                raise BallotFileError(f"line {k}: bad count {count_part.strip()!r}") from None
            if count <= 0:
                raise BallotFileError(f"line {k}: count must be positive, got {count}")
            ballot = _parse_ranking(ranking_part, name_to_id, roster_fixed, names, k)
            ballots.extend([ballot] * count)

    if not ballots:
        raise BallotFileError("ballot file contains no ballots")
    if not names:
        raise BallotFileError("no candidates declared or discovered")

    candidates = tuple(Candidate(i, n) for i, n in enumerate(names))
    if reported_winner is not None:
        if reported_winner not in name_to_id:
            raise BallotFileError(f"unknown reported winner {reported_winner!r}")
        winner = name_to_id[reported_winner]
    else:
        winner = tabulate_winner_of(ballots, len(names))
    return Contest(candidates, tuple(ballots), winner)


def tabulate_winner_of(ballots, C: int) -> int:
    """IRV winner of a raw ballot list, ties broken by ascending id."""
    from .tabulation import tabulate
    contest = Contest(
        tuple(Candidate(i, f"_{i}") for i in range(C)),
        tuple(ballots),
        0,
    )
    return tabulate(contest).order[-1]


def serialize_ballot_file(contest: Contest, format: str = "csv_ranks") -> bytes:
    """Inverse of parse_ballot_file (round-trips the ballots and roster)."""
    names = contest.candidate_names()
    lines = ["# candidates: " + ",".join(names)]
    if format == "csv_ranks":
        for b in contest.ballots:
            lines.append(">".join(names[c] for c in b))
    elif format == "aggregated_csv":
        # group consecutive identical ballots so in-place expansion round-trips
        run: Ballot | None = None
        count = 0
        for b in list(contest.ballots) + [None]:
            if b == run and b is not None:
                count += 1
                continue
            if run is not None or count:
                lines.append(">".join(names[c] for c in run) + f",{count}")
            run, count = b, 1
    else:
        raise ValueError(f"unknown ballot file format {format!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def generate_pathological(m) -> Contest:
    """Synthetic 6-candidate, 56,000-ballot contest that is hard to audit.

    Candidates a (true winner), b (alternate winner), c1..c4.  Ballots:
    16000+2m of [a], 8000-2m of [b], and 8000 of [c_i, b, a] for each i.
    m may be fractional (e.g. 2.5) as long as 2m is an integer.
    """
    two_m = Fraction(m) * 2
    if two_m.denominator != 1:
        raise ValueError(f"2m must be an integer, got m={m}")
    two_m = int(two_m)
    if not (0 <= two_m <= 8000):
        raise ValueError(f"2m out of range [0, 8000]: {two_m}")

    names = ["a", "b", "c1", "c2", "c3", "c4"]
    a, b = 0, 1
    ballots: list[Ballot] = []
    ballots.extend([(a,)] * (16000 + two_m))
    ballots.extend([(b,)] * (8000 - two_m))
    for ci in (2, 3, 4, 5):
        ballots.extend([(ci, b, a)] * 8000)
    return Contest(
        tuple(Candidate(i, n) for i, n in enumerate(names)),
        tuple(ballots),
        reported_winner=a,
    )
