import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import atlas_graphs, looser, naive_colorable, naive_colorings, random_graph, random_slist
from spackcol.gadgets import build_J_122, build_L_122
from spackcol.graph import Graph, build_complete, build_cycle, build_path, build_spider_y
from spackcol.solver import (ConstraintSet, SList, SolverAborted, Status, canonical_form,
                             enumerate_colorings, packing_chromatic_number, read_coloring,
                             slist_leq, solve, solve_constrained, verify_coloring,
                             write_coloring)


def test_slist_validation():
    assert SList.parse("1,2,2") == (1, 2, 2)
    assert repr(SList((1, 2, 2))) == "(1,2,2)"
    assert SList((2, 2, 2, 3)).count(2) == 3
    for bad in ((), (0, 1), (2, 1)):
        with pytest.raises(ValueError):
            SList(bad)


def test_slist_leq_examples():
    assert slist_leq((1, 3, 5, 8), (1, 2, 5, 6))
    assert not slist_leq((2, 2, 3, 3), (2, 3, 3, 3))
    assert slist_leq((2, 2, 3), (2, 2, 3))
    with pytest.raises(ValueError):
        slist_leq((1, 2), (1, 2, 3))


def test_verify_coloring_examples():
    p2 = build_path(2)
    assert verify_coloring(p2, (1, 1), (1, 2))
    chk = verify_coloring(p2, (1, 1), (1, 1))
    assert not chk and (chk.violation.u, chk.violation.v, chk.violation.cls) == (0, 1, 1)
    c4 = build_cycle(4)
    assert verify_coloring(c4, (1, 2, 2), (1, 2, 1, 3))
    assert naive_colorable(c4, (1, 2, 2))
    with pytest.raises(ValueError):
        verify_coloring(p2, (1, 1), (1, 3))
    with pytest.raises(ValueError):
        verify_coloring(p2, (1, 1), (1,))


def test_solve_examples():
    assert solve(build_complete(4), (1, 1, 1)).status is Status.NOT_COLORABLE
    assert solve(build_path(16), (1, 3, 5, 8)).status is Status.NOT_COLORABLE
    v = solve(build_path(15), (1, 3, 5, 8))
    assert v.colorable and verify_coloring(build_path(15), (1, 3, 5, 8), v.coloring)
    assert solve(build_spider_y(2), (2, 3, 3, 3)).status is Status.NOT_COLORABLE


def test_budget_abort_is_distinct():
    v = solve(build_path(16), (1, 3, 5, 8), budget=5)
    assert v.status is Status.ABORTED and v.aborted and not v.colorable


def test_constrained_gadget_examples():
    L = build_L_122()
    a, b = L.connectors
    cs = ConstraintSet(fixed={a: 2, b: 3})
    assert solve_constrained(L.graph, L.s, cs).status is Status.NOT_COLORABLE
    J = build_J_122()
    a, b = J.connectors
    cs = ConstraintSet(fixed={a: 2, b: 2})
    assert solve_constrained(J.graph, J.s, cs).status is Status.NOT_COLORABLE
    g = build_cycle(5)
    assert solve_constrained(g, (1, 2, 2), ConstraintSet()).status == solve(g, (1, 2, 2)).status


def test_syntactic_contradiction():
    cs = ConstraintSet(fixed={0: 1}, forbidden={(0, 1)})
    v = solve_constrained(build_path(3), (1, 1), cs)
    assert v.status is Status.NOT_COLORABLE and "syntactic contradiction" in v.note


def test_enumerate_examples():
    assert len(enumerate_colorings(build_path(1), (1, 1)).colorings) == 1
    assert len(enumerate_colorings(build_path(2), (1, 1)).colorings) == 1
    p4 = build_path(4)
    raw = set(naive_colorings(p4, (1, 2, 2)))
    canon = {canonical_form(c, (1, 2, 2)) for c in raw}
    got = enumerate_colorings(p4, (1, 2, 2))
    assert not got.truncated
    assert set(got.colorings) == canon and len(got.colorings) == len(canon)
    # orbit quotient: classes 2 and 3 are interchangeable
    orbit = lambda c: 2 if (2 in c or 3 in c) else 1
    assert sum(1 / orbit(c) for c in raw) == len(canon)


def test_enumerate_cap_truncates():
    e = enumerate_colorings(build_path(6), (1, 1, 1), cap=3)
    assert e.truncated and len(e.colorings) == 3


def test_packing_chromatic_number_examples():
    assert packing_chromatic_number(build_path(1), 5) == 1
    assert packing_chromatic_number(build_path(4), 5) == 3
    assert packing_chromatic_number(build_cycle(4), 5) == 3
    assert packing_chromatic_number(build_complete(4), 3) is None
    with pytest.raises(SolverAborted):
        packing_chromatic_number(build_path(30), 4, budget=1)


def test_coloring_io_round_trip():
    s, c = read_coloring(write_coloring((1, 2, 1, 3), (1, 2, 2)))
    assert s == (1, 2, 2) and c == (1, 2, 1, 3)
    with pytest.raises(ValueError):
        read_coloring("c 2 1\n")


@pytest.mark.parametrize("s", [(1, 1), (1, 2), (1, 2, 2), (1, 1, 2), (2, 2, 3), (1, 1, 1), (1, 3)])
def test_oracle_equivalence_small(s):
    for g in atlas_graphs(5):
        v = solve(g, s)
        assert v.colorable == naive_colorable(g, s), (sorted(g.edges), s)


def test_oracle_equivalence_constrained():
    rng = random.Random(2024)
    for _ in range(250):
        g = random_graph(rng, 1, 6)
        s = random_slist(rng, 2, 3, 3)
        k = len(s)
        cs = ConstraintSet()
        for v in range(g.n):
            r = rng.random()
            if r < 0.1:
                cs.fixed[v] = rng.randint(1, k)
            elif r < 0.25:
                cs.forbidden.add((v, rng.randint(1, k)))
        if g.n >= 2:
            u, v = rng.sample(range(g.n), 2)
            classes = tuple(sorted(rng.sample(range(1, k + 1), 2))) if rng.random() < 0.5 else None
            entry = (u, v, classes) if classes else (u, v)
            (cs.distinct if rng.random() < 0.5 else cs.equal).append(entry)
        got = solve_constrained(g, s, cs)
        assert got.colorable == naive_colorable(g, s, cs)


def test_isomorphism_invariance():
    rng = random.Random(5)
    for _ in range(60):
        g = random_graph(rng, 2, 8)
        s = random_slist(rng, 2, 4, 4)
        perm = list(range(g.n))
        rng.shuffle(perm)
        assert solve(g, s).colorable == solve(g.relabel(perm), s).colorable


@st.composite
def graphs_and_lists(draw):
    n = draw(st.integers(1, 7))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    s = tuple(sorted(draw(st.lists(st.integers(1, 4), min_size=1, max_size=4))))
    return Graph.from_edges(n, edges), s


@settings(max_examples=80, deadline=None)
@given(graphs_and_lists(), st.randoms(use_true_random=False))
def test_monotone_and_hereditary(case, rnd):
    g, s = case
    v = solve(g, s)
    if not v.colorable:
        return
    assert verify_coloring(g, s, v.coloring)
    weaker = looser(rnd, s)
    assert slist_leq(s, weaker)
    assert solve(g, weaker).colorable
    keep = [x for x in range(g.n) if rnd.random() < 0.6]
    if keep:
        sub, idx = g.induced(keep)
        assert verify_coloring(sub, s, [v.coloring[x] for x in idx])
        assert solve(sub, s).colorable
