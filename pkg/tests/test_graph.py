import itertools
import random

import networkx as nx
import pytest

from spackcol.characterizations import family_T0, family_T1
from spackcol.gadgets import build_H_122
from spackcol.graph import (UNREACHABLE, Graph, GraphBuilder, GraphFormatError, MultiGraph,
                            all_pairs_distances, build_complete, build_cycle, build_path,
                            build_spider_y, build_star, contains_subtree, glue,
                            read_graph, read_multigraph, structure_probes, subdivide_edge,
                            write_graph)


def iso(a: Graph, b: Graph) -> bool:
    return nx.is_isomorphic(a.to_networkx(), b.to_networkx())


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 1), (1, 0)], strict=True)


def test_path_builders():
    p1 = build_path(1)
    assert (p1.n, p1.m) == (1, 0)
    p16 = build_path(16)
    assert (p16.n, p16.m) == (16, 15)
    d = all_pairs_distances(build_path(5))
    assert d(0, 4) == 4
    assert build_path(5).labels[0] == "end0"


def test_spider_builder():
    y1 = build_spider_y(1)
    assert iso(y1, build_star(3))
    y2 = build_spider_y(2)
    assert y2.n == 7 and y2.degree(0) == 3
    assert y2.labels[0] == "a0"
    y4 = build_spider_y(4)
    assert y4.n == 13
    assert all_pairs_distances(y4).eccentricity(0) == 4


@pytest.mark.parametrize("n", range(1, 9))
def test_family_closed_forms(n):
    assert (build_path(n).n, build_path(n).m) == (n, n - 1)
    assert (build_complete(n).n, build_complete(n).m) == (n, n * (n - 1) // 2)
    y = build_spider_y(n)
    assert (y.n, y.m) == (3 * n + 1, 3 * n)
    if n >= 3:
        assert (build_cycle(n).n, build_cycle(n).m) == (n, n)


def test_distances_basic():
    d = all_pairs_distances(build_path(3))
    assert d(0, 2) == 2
    y2 = build_spider_y(2)
    tips = [v for v, t in y2.labels.items() if t in ("a2", "b2")]
    assert all_pairs_distances(y2)(*tips) == 4
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    dd = all_pairs_distances(two)
    assert dd(0, 2) == UNREACHABLE and not dd.reachable(0, 3)


def test_distance_matrix_properties_and_relabel():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 9)
        g = Graph.from_networkx(nx.gnp_random_graph(n, 0.4, seed=rng.randrange(10**6)))
        d = all_pairs_distances(g)
        for u, v in itertools.product(range(n), repeat=2):
            assert d(u, v) == d(v, u)
            assert (d(u, v) == 0) == (u == v)
            for w in range(n):
                if d.reachable(u, w) and d.reachable(w, v):
                    assert d(u, v) <= d(u, w) + d(w, v)
        perm = list(range(n))
        rng.shuffle(perm)
        dp = all_pairs_distances(g.relabel(perm))
        for u, v in itertools.product(range(n), repeat=2):
            assert dp(perm[u], perm[v]) == d(u, v)


def test_glue_examples():
    p2 = build_path(2)
    assert iso(glue(p2, p2, [(1, 0)]), build_path(3))
    bow = glue(build_complete(3), build_complete(3), [(0, 0)])
    assert (bow.n, bow.m) == (5, 6)
    h = build_H_122()
    ring = build_cycle(6)
    glued = glue(ring, h.graph, [(0, h.connectors[0])])
    assert glued.n == ring.n + h.graph.n - 1


def test_glue_errors():
    with pytest.raises(ValueError):
        glue(build_path(3), build_path(3), [(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        glue(build_path(3), build_path(3), [(0, 0), (1, 0)])


def test_glue_associative_on_random_cases():
    rng = random.Random(7)
    for _ in range(15):
        a, b, c = (Graph.from_networkx(nx.gnp_random_graph(rng.randint(2, 4), 0.6,
                                                           seed=rng.randrange(10**6)))
                   for _ in range(3))
        pa, pb = rng.randrange(a.n), rng.randrange(b.n)
        qb, qc = rng.choice([x for x in range(b.n) if x != pb] or [None]), rng.randrange(c.n)
        if qb is None:
            continue
        ab, m_ab = glue(a, b, [(pa, pb)], return_map=True)
        left = glue(ab, c, [(m_ab[qb], qc)])
        bc = glue(b, c, [(qb, qc)])
        right = glue(a, bc, [(pa, pb)])
        assert iso(left, right)


def test_subdivide_examples():
    p2 = build_path(2)
    assert iso(subdivide_edge(p2, (0, 1), 1), build_path(3))
    p5 = subdivide_edge(p2, (0, 1), 3)
    assert iso(p5, build_path(5))
    central = [v for v, t in p5.labels.items() if t == "central"]
    assert len(central) == 1 and all_pairs_distances(p5)(central[0], 0) == 2
    k3 = build_complete(3)
    g = k3
    for e in k3.sorted_edges():
        g = subdivide_edge(g, e, 1)
    assert iso(g, build_cycle(6))
    with pytest.raises(ValueError):
        subdivide_edge(p2, (0, 5), 1)


def test_subdivide_counts_multigraph():
    mg = MultiGraph(2, ((0, 1), (0, 1), (0, 1)))
    for t in (1, 2, 3):
        out = subdivide_edge(mg, (0, 1), t, instance=1)
        assert out.n == mg.n + t and out.m == mg.m + t
    with pytest.raises(ValueError):
        subdivide_edge(mg, (0, 1), 1, instance=3)


def test_structure_probes():
    k4 = structure_probes(build_complete(4))
    assert k4.is_cubic and not k4.is_bipartite and len(k4.vertex_cover_leq_3) == 3
    c5 = structure_probes(build_cycle(5))
    assert c5.is_subcubic and not c5.is_bipartite and c5.vertex_cover_leq_3 is not None
    assert structure_probes(build_complete(5)).vertex_cover_leq_3 is None


def test_read_write_round_trip():
    g = read_graph("p 2 1\ne 1 2\n")
    assert g == build_path(2)
    text = "# comment\np 4 3\ne 1 2\ne 2 3\ne 3 4\nl 1 tip\n"
    h = read_graph(text)
    assert read_graph(write_graph(h)) == h
    assert h.labels[0] == "tip"
    mg = read_multigraph("pm 2 2\ne 1 2\ne 1 2\n")
    assert mg.m == 2 and read_multigraph(write_graph(mg)).edges == mg.edges


@pytest.mark.parametrize("text", [
    "p 2 1\ne 1 3\n",           # out of range
    "p 2 2\ne 1 2\ne 2 1\n",    # duplicate
    "p 2 1\ne 1 1\n",           # self-loop
    "e 1 2\n",                  # no header
    "p 2\n",                    # malformed header
    "p 2 2\ne 1 2\n",           # edge count mismatch
    "p 2 1\np 2 1\ne 1 2\n",    # second header
])
def test_read_errors(text):
    with pytest.raises(GraphFormatError):
        read_graph(text)


def _brute_embeds(host: Graph, pattern: Graph) -> bool:
    return nx.algorithms.isomorphism.GraphMatcher(
        host.to_networkx(), pattern.to_networkx()).subgraph_is_monomorphic()


def test_contains_subtree_examples():
    t0, t1 = family_T0(), family_T1()
    assert contains_subtree(t1, t0) is None
    assert _brute_embeds(t1, t0) is False
    emb = contains_subtree(t0, t0)
    assert emb is not None and len(set(emb.values())) == t0.n
    for u, v in t0.edges:
        assert t0.has_edge(emb[u], emb[v])
    assert contains_subtree(build_path(1), build_path(2)) is None
    assert contains_subtree(build_path(4), build_path(2)) is not None
    with pytest.raises(ValueError):
        contains_subtree(build_cycle(4), build_path(2))


def test_contains_subtree_against_brute_force():
    rng = random.Random(11)
    for _ in range(150):
        host = Graph.from_networkx(nx.random_labeled_tree(rng.randint(1, 11), seed=rng.randrange(10**6)))
        pat = Graph.from_networkx(nx.random_labeled_tree(rng.randint(1, 7), seed=rng.randrange(10**6)))
        emb = contains_subtree(host, pat)
        assert (emb is not None) == _brute_embeds(host, pat)
        if emb is not None:
            assert len(set(emb.values())) == pat.n
            assert all(host.has_edge(emb[u], emb[v]) for u, v in pat.edges)


def test_builder_remove_vertex_compacts():
    b = GraphBuilder(4)
    b.add_path([0, 1, 2, 3])
    b.remove_vertex(1)
    g = b.build()
    assert g.n == 3 and g.sorted_edges() == [(1, 2)]
