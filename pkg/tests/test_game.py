"""Core game mechanics: strategies, verification, search, lifts.

The reference oracle below replays the game with plain Python loops and no
shared code with the vectorized verifier — any disagreement means one of
them misreads the conventions.
"""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatlab import (
    InfeasibleError,
    ParameterError,
    Strategy,
    build_graph,
    complete_sum_strategy,
    correct_guess_counts,
    custom_graph,
    max_solvable_set_search,
    minimum_vertex_cover_size,
    read_assignment_set,
    read_strategy_file,
    search_strategy,
    solvable_interval_set,
    strategy_guesses,
    subgraph_lift,
    sum_target_strategy,
    verify_strategy,
    vertex_cover_bound,
    write_assignment_set,
    write_strategy_file,
)


# --- reference oracle (kept deliberately dumb) -----------------------------


def oracle_guesses(g, q, tables, assignment):
    """Replay the table convention by hand: ascending neighbors, the
    smallest neighbor is the least significant base-q digit."""
    out = []
    for v in range(g.n_vertices):
        neighbors = sorted(u for u in range(g.n_vertices) if u in g.adjacency[v])
        idx = 0
        for rank, u in enumerate(neighbors):
            idx += assignment[u] * q**rank
        out.append(int(tables[v][idx]))
    return tuple(out)


def oracle_verify(g, q, tables, restriction=None):
    """Returns (wins, first_losing_assignment_or_None, n_losses)."""
    space = (sorted(restriction) if restriction is not None
             else itertools.product(range(q), repeat=g.n_vertices))
    first = None
    losses = 0
    for assignment in space:
        guesses = oracle_guesses(g, q, tables, assignment)
        if not any(gu == c for gu, c in zip(guesses, assignment)):
            losses += 1
            if first is None:
                first = tuple(assignment)
    return losses == 0, first, losses


def random_tables(g, q, rng):
    return [[rng.randrange(q) for _ in range(q ** g.degree(v))]
            for v in range(g.n_vertices)]


# --- graphs ----------------------------------------------------------------


def test_build_graph_families():
    k5 = build_graph("complete", 5)
    assert k5.n_vertices == 5
    assert len(k5.edges) == 10

    b = build_graph("complete_bipartite", 2, 3)
    assert b.n_vertices == 5
    assert len(b.edges) == 6
    assert b.adjacency[0] == (2, 3, 4)

    w = build_graph("windmill", 3, 2)
    assert w.n_vertices == 5
    # blades {1,2} and {3,4}, all joined to the axle 0
    assert w.adjacency[0] == (1, 2, 3, 4)
    assert w.adjacency[1] == (0, 2) and w.adjacency[3] == (0, 4)

    book = build_graph("book", 2, 3)
    assert book.n_vertices == 5
    assert len(book.edges) == 1 + 2 * 3


def test_build_graph_rejects_bad_params():
    with pytest.raises(ParameterError):
        build_graph("complete", 0)
    with pytest.raises(ParameterError):
        build_graph("windmill", 1, 2)
    with pytest.raises(ParameterError):
        build_graph("nonsense", 3)
    with pytest.raises(ParameterError):
        custom_graph(2, [(0, 2)])
    with pytest.raises(ParameterError):
        custom_graph(2, [(1, 1)])


# --- verification conventions ----------------------------------------------


def test_sum_strategy_exactly_one_correct():
    for n in range(1, 6):
        g = build_graph("complete", n)
        s = complete_sum_strategy(n, n)
        report = verify_strategy(g, n, s)
        assert report.wins and report.assignments_checked == n**n
        counts = correct_guess_counts(g, n, s)
        assert set(counts.tolist()) == {1}


def test_counterexample_is_lexicographically_least():
    # all-zero guesses on K_2 lose exactly on assignments with no zeros
    g = build_graph("complete", 2)
    s = Strategy.from_lists(3, [[0, 0, 0], [0, 0, 0]])
    report = verify_strategy(g, 3, s)
    assert not report.wins
    assert report.counterexample == (1, 1)
    # position of (1,1) in lex order is 1*3+1 = 4, so 5 assignments touched
    assert report.assignments_checked == 5


def test_assignments_checked_independent_of_threads():
    g = build_graph("complete", 3)
    s = Strategy.from_lists(4, [[0] * 16] * 3)
    reports = [verify_strategy(g, 4, s, threads=t) for t in (1, 2, 4)]
    assert len({(r.wins, r.counterexample, r.assignments_checked) for r in reports}) == 1


def test_verify_rejects_malformed_strategies():
    g = build_graph("complete", 2)
    with pytest.raises(ParameterError):
        verify_strategy(g, 3, Strategy.from_lists(2, [[0, 0], [0, 0]]))
    with pytest.raises(ParameterError):
        verify_strategy(g, 2, Strategy.from_lists(2, [[0, 0, 0], [0, 0]]))
    with pytest.raises(ParameterError):
        verify_strategy(g, 2, Strategy.from_lists(2, [[0, 2], [0, 0]]))


def test_verify_budget_refusal():
    g = build_graph("complete", 5)
    s = complete_sum_strategy(5, 5)
    with pytest.raises(InfeasibleError) as exc:
        verify_strategy(g, 5, s, budget=100)
    assert exc.value.required == 5**5


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_verify_matches_oracle_on_random_strategies(data):
    family = data.draw(st.sampled_from(["complete", "complete_bipartite", "windmill", "path"]))
    if family == "complete":
        g = build_graph("complete", data.draw(st.integers(1, 4)))
    elif family == "complete_bipartite":
        g = build_graph("complete_bipartite", data.draw(st.integers(1, 2)),
                        data.draw(st.integers(1, 3)))
    elif family == "windmill":
        g = build_graph("windmill", 2, data.draw(st.integers(1, 3)))
    else:
        n = data.draw(st.integers(2, 4))
        g = custom_graph(n, [(i, i + 1) for i in range(n - 1)])
    q = data.draw(st.integers(1, 3))
    seed = data.draw(st.integers(0, 2**31))
    tables = random_tables(g, q, random.Random(seed))

    want_wins, want_first, _ = oracle_verify(g, q, tables)
    report = verify_strategy(g, q, Strategy.from_lists(q, tables))
    assert report.wins == want_wins
    assert report.counterexample == want_first


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_restricted_verify_matches_oracle(data):
    g = build_graph("complete", data.draw(st.integers(2, 3)))
    q = data.draw(st.integers(2, 3))
    rng = random.Random(data.draw(st.integers(0, 2**31)))
    tables = random_tables(g, q, rng)
    everything = list(itertools.product(range(q), repeat=g.n_vertices))
    restriction = frozenset(a for a in everything if rng.random() < 0.5)
    if not restriction:
        restriction = frozenset({everything[0]})

    want_wins, want_first, _ = oracle_verify(g, q, tables, restriction)
    report = verify_strategy(g, q, Strategy.from_lists(q, tables),
                             restriction=restriction)
    assert report.wins == want_wins
    assert report.counterexample == want_first
    assert report.assignments_checked <= len(restriction)


def test_strategy_guesses_matches_oracle():
    g = build_graph("complete_bipartite", 2, 2)
    rng = random.Random(7)
    tables = random_tables(g, 3, rng)
    s = Strategy.from_lists(3, tables)
    for assignment in itertools.product(range(3), repeat=4):
        assert strategy_guesses(g, 3, s, assignment) == \
            oracle_guesses(g, 3, tables, assignment)


# --- solvable sets ----------------------------------------------------------


@pytest.mark.parametrize("n,q", [(2, 3), (2, 5), (3, 4)])
def test_interval_set_size_and_win(n, q):
    solvable, strat = solvable_interval_set(n, q)
    assert len(solvable) == n * q ** (n - 1)
    g = build_graph("complete", n)
    assert verify_strategy(g, q, strat, restriction=solvable.members).wins


def test_interval_set_loses_outside_itself():
    solvable, strat = solvable_interval_set(2, 3)
    g = build_graph("complete", 2)
    outside = frozenset(itertools.product(range(3), repeat=2)) - solvable.members
    report = verify_strategy(g, 3, strat, restriction=outside)
    assert not report.wins


def test_max_solvable_set_search_small():
    assert max_solvable_set_search(2, 2) == 4
    assert max_solvable_set_search(2, 3) == 6
    with pytest.raises(InfeasibleError):
        max_solvable_set_search(3, 4)


def test_sum_target_strategy_splits_targets():
    # two players, q=5, targets {0, 3}: whoever owns the true total wins
    strat = sum_target_strategy(2, 5, [0, 3])
    g = build_graph("complete", 2)
    members = frozenset(a for a in itertools.product(range(5), repeat=2)
                        if sum(a) % 5 in (0, 3))
    assert verify_strategy(g, 5, strat, restriction=members).wins


# --- search -----------------------------------------------------------------


def test_search_finds_and_refutes():
    g = build_graph("complete", 2)
    found = search_strategy(g, 2)
    assert found.strategy is not None
    assert verify_strategy(g, 2, found.strategy).wins

    refuted = search_strategy(g, 3)
    assert refuted.strategy is None and refuted.proven_unwinnable

    tripped = search_strategy(build_graph("complete", 3), 3, budget=2)
    assert tripped.strategy is None and not tripped.proven_unwinnable


def test_search_agrees_with_known_numbers():
    # complete graphs are solvable at q=n but not q=n+1 (the n=3
    # refutation tree runs to ~4e7 nodes, so only refute up to n=2 here)
    for n in (1, 2, 3):
        assert search_strategy(build_graph("complete", n), n).strategy is not None
    for n in (1, 2):
        outcome = search_strategy(build_graph("complete", n), n + 1, budget=10**6)
        assert outcome.proven_unwinnable


# --- lifting ----------------------------------------------------------------


def test_subgraph_lift_keeps_winning():
    h = build_graph("complete", 2)
    s = complete_sum_strategy(2, 2)
    g = build_graph("complete", 4)
    lifted = subgraph_lift(h, s, {0: 1, 1: 3}, g, 2)
    assert verify_strategy(g, 2, lifted).wins


def test_subgraph_lift_validates_embedding():
    h = build_graph("complete", 2)
    s = complete_sum_strategy(2, 2)
    g = build_graph("complete_bipartite", 2, 2)
    # 0 and 1 are both left vertices: not an edge, embedding invalid
    with pytest.raises(ParameterError):
        subgraph_lift(h, s, {0: 0, 1: 1}, g, 2)
    with pytest.raises(ParameterError):
        subgraph_lift(h, s, {0: 0, 1: 0}, g, 2)


# --- vertex covers ----------------------------------------------------------


def test_minimum_vertex_cover_exact():
    assert minimum_vertex_cover_size(build_graph("complete", 4)) == 3
    assert minimum_vertex_cover_size(build_graph("complete_bipartite", 2, 5)) == 2
    assert minimum_vertex_cover_size(build_graph("windmill", 3, 3)) == 4
    # book(d, n): the d-clique spine covers everything
    assert minimum_vertex_cover_size(build_graph("book", 3, 4)) == 3


def test_vertex_cover_bound_books():
    expected = {1: 2, 2: 1 + 1 + 4, 3: 1 + 1 + 4 + 27}
    for d, want in expected.items():
        for n in range(1, 7):
            assert vertex_cover_bound(build_graph("book", d, n)) == want


# --- files ------------------------------------------------------------------


def test_strategy_file_round_trip(tmp_path):
    g = build_graph("windmill", 3, 2)
    _, strat = solvable_interval_set(2, 4)  # wrong shape on purpose below
    s = complete_sum_strategy(3, 3)
    g3 = build_graph("complete", 3)
    path = tmp_path / "s.json"
    write_strategy_file(str(path), g3, s)
    got_g, got_q, got_s = read_strategy_file(str(path))
    assert (got_g.family, got_g.params, got_q) == ("complete", (3,), 3)
    assert got_s.table_lists() == s.table_lists()

    bad = tmp_path / "bad.json"
    bad.write_text('{"graph": {"family": "complete", "params": [3]}, "q": 3, "tables": [[0]]}')
    with pytest.raises(ParameterError):
        read_strategy_file(str(bad))


def test_assignment_set_round_trip(tmp_path):
    members = [(0, 1), (2, 2), (1, 0)]
    path = tmp_path / "a.json"
    write_assignment_set(str(path), 3, 2, members)
    q, n, got = read_assignment_set(str(path))
    assert (q, n) == (3, 2)
    assert got == tuple(sorted(members))
