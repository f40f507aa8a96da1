import pytest
from hypothesis import given, strategies as st

from awaire.contest import (BallotFileError, EXHAUSTED, first_preference,
                            generate_pathological, parse_ballot_file,
                            serialize_ballot_file)
from awaire.tabulation import tabulate


def test_parse_csv_ranks_with_roster():
    data = b"# candidates: A,B,C,D\nA>B>C\n"
    contest = parse_ballot_file(data)
    assert contest.candidate_names() == ["A", "B", "C", "D"]
    assert contest.ballots == ((0, 1, 2),)


def test_parse_blank_line_is_blank_ballot():
    contest = parse_ballot_file(b"# candidates: A,B\nA>B\n\nB\n")
    assert contest.ballots == ((0, 1), (), (1,))


def test_parse_discovers_candidates_in_order():
    contest = parse_ballot_file(b"C>A\nB\n")
    assert contest.candidate_names() == ["C", "A", "B"]


def test_parse_aggregated_expands_in_place():
    contest = parse_ballot_file(b"# candidates: A,B\nA>B,3\nB,1\n",
                                format="aggregated_csv")
    assert contest.ballots == ((0, 1), (0, 1), (0, 1), (1,))


@pytest.mark.parametrize("data,fmt", [
    (b"A>B>A\n", "csv_ranks"),
    (b"# candidates: A,B\nA>C\n", "csv_ranks"),
    (b"# candidates: A,B\nA,0\n", "aggregated_csv"),
    (b"# candidates: A,B\nA,-2\n", "aggregated_csv"),
    (b"", "csv_ranks"),
])
def test_parse_errors(data, fmt):
    with pytest.raises(BallotFileError):
        parse_ballot_file(data, format=fmt)


def test_unknown_reported_winner():
    with pytest.raises(BallotFileError):
        parse_ballot_file(b"A>B\n", reported_winner="Z")


@pytest.mark.parametrize("fmt", ["csv_ranks", "aggregated_csv"])
def test_round_trip(fmt, rng):
    from conftest import random_contest
    contest = random_contest(rng, 4, 60)
    data = serialize_ballot_file(contest, fmt)
    again = parse_ballot_file(data, fmt,
                              reported_winner=contest.candidate_names()[contest.reported_winner])
    assert again == contest


def test_first_preference_examples():
    assert first_preference((2, 1), {0, 1}) == 1
    assert first_preference((0,), {1, 2}) == EXHAUSTED
    assert first_preference((1, 0), {0, 1, 2}) == 1
    assert first_preference((), {0}) == EXHAUSTED


@given(st.permutations(list(range(5))), st.integers(1, 5))
def test_first_preference_full_standing_is_head(ranking, k):
    ballot = tuple(ranking[:k])
    assert first_preference(ballot, set(range(5))) == ballot[0]


@given(st.permutations(list(range(5))), st.integers(0, 5))
def test_first_preference_monotone_under_shrinking(ranking, k):
    # removing the returned candidate never surfaces an earlier-ranked one
    ballot = tuple(ranking[:k])
    standing = set(range(5))
    prev_pos = -1
    while standing:
        fp = first_preference(ballot, standing)
        if fp == EXHAUSTED:
            break
        pos = ballot.index(fp)
        assert pos > prev_pos
        prev_pos = pos
        standing.discard(fp)


def test_generate_pathological_m25():
    contest = generate_pathological(25)
    assert contest.num_ballots == 56000
    counts = {}
    for b in contest.ballots:
        counts[b] = counts.get(b, 0) + 1
    assert counts[(0,)] == 16050
    assert counts[(1,)] == 7950
    for ci in (2, 3, 4, 5):
        assert counts[(ci, 1, 0)] == 8000


def test_generate_pathological_m0():
    contest = generate_pathological(0)
    assert sum(1 for b in contest.ballots if b == (0,)) == 16000
    assert sum(1 for b in contest.ballots if b == (1,)) == 8000


@pytest.mark.parametrize("m", [0, 2.5, 25, 250, 4000])
def test_generate_pathological_total_invariant(m):
    assert generate_pathological(m).num_ballots == 56000


@pytest.mark.parametrize("m", [0.3, -1, 4000.5, 9000])
def test_generate_pathological_rejects_bad_m(m):
    with pytest.raises(ValueError):
        generate_pathological(m)


def test_generate_pathological_tabulation():
    result = tabulate(generate_pathological(25))
    assert result.order[0] == 1  # b eliminated first
    assert result.winner == 0    # a wins
