"""Hardness gadgets (transmitters, antitransmitters, clause simulators) and
their machine verification by constrained solving.

Vertex numbering inside every constructor is deterministic; the golden file
under ``tests/golden`` pins the resulting edge lists.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Graph, GraphBuilder, all_pairs_distances
from .solver import (DEFAULT_BUDGET, ConstraintSet, SList, Status, as_slist,
                     solve_constrained)

TRANSMITTER = "transmitter"
ANTITRANSMITTER = "antitransmitter"
CLAUSE = "clause-simulator"
_ARITY = {TRANSMITTER: 2, ANTITRANSMITTER: 2, CLAUSE: 3}


@dataclass(frozen=True)
class GadgetRole:
    kind: str
    i: int
    j: int

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown role {self.kind}")
        if not 1 <= self.i <= self.j:
            raise ValueError("role needs 1 <= i <= j")

    @property
    def arity(self) -> int:
        return _ARITY[self.kind]

    def legal(self, config: Sequence[int]) -> bool:
        """Whether connector classes ``config`` are allowed by the role."""
        if self.kind == TRANSMITTER:
            return config[0] == config[1]
        if self.kind == ANTITRANSMITTER:
            return config[0] != config[1]
        return len(set(config)) > 1


@dataclass(frozen=True)
class Gadget:
    name: str
    s: SList
    graph: Graph
    connectors: tuple[int, ...]
    role: GadgetRole | None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(set(self.connectors)) != len(self.connectors):
            raise ValueError("connectors must be distinct")
        if any(not 0 <= c < self.graph.n for c in self.connectors):
            raise ValueError("connector out of range")
        if self.role is not None:
            if len(self.connectors) != self.role.arity:
                raise ValueError(f"{self.role.kind} needs {self.role.arity} connectors")
            if self.role.j > len(self.s):
                raise ValueError("role index beyond SList")


def _finish(b: GraphBuilder, connectors: Sequence[int]) -> Graph:
    for idx, c in enumerate(connectors, 1):
        b.labels[c] = f"conn{idx}"
    return b.build()


def _path(b: GraphBuilder, start: int, length: int, end: int | None = None) -> list[int]:
    """Path from ``start`` with ``length`` new vertices, optionally closed onto ``end``."""
    verts = [start] + b.add_vertices(length)
    if end is not None:
        verts.append(end)
    b.add_path(verts)
    return verts


# --- (1,2,2) --------------------------------------------------------------

def build_L_122() -> Gadget:
    """P_5 with a pendant on its middle vertex."""
    b = GraphBuilder(5)
    b.add_path(range(5))
    p = b.add_vertex()
    b.add_edge(2, p)
    return Gadget("L_122", SList((1, 2, 2)), _finish(b, (0, 4)), (0, 4),
                  GadgetRole(TRANSMITTER, 2, 3))


def build_J_122() -> Gadget:
    """P_7 with pendants on its 3rd and 5th vertices."""
    b = GraphBuilder(7)
    b.add_path(range(7))
    for v in (2, 4):
        b.add_edge(v, b.add_vertex())
    return Gadget("J_122", SList((1, 2, 2)), _finish(b, (0, 6)), (0, 6),
                  GadgetRole(ANTITRANSMITTER, 2, 3))


def build_H_122() -> Gadget:
    """Triangle of three 6-edge paths on corners 0,1,2 with two pendants.

    Sides: 0..1 via 3-7, 0..2 via 8-12, 1..2 via 13-17; pendant 18 hangs on
    the second internal vertex of side 0..2, pendant 19 on the second of 1..2.
    """
    b = GraphBuilder(3)
    _path(b, 0, 5, 1)
    left = _path(b, 0, 5, 2)
    right = _path(b, 1, 5, 2)
    b.add_edge(left[2], b.add_vertex())
    b.add_edge(right[2], b.add_vertex())
    return Gadget("H_122", SList((1, 2, 2)), _finish(b, (0, 1, 2)), (0, 1, 2),
                  GadgetRole(CLAUSE, 2, 3))


# --- (1,1,k) --------------------------------------------------------------

def _triangle_pair(b: GraphBuilder, prev: int) -> tuple[int, int, int, int]:
    """Spine vertices a, c, b after ``prev`` with apex t adjacent to all three."""
    a, c, e, t = b.add_vertices(4)
    b.add_path([prev, a, c, e])
    for x in (a, c, e):
        b.add_edge(t, x)
    return a, c, e, t


def build_L_k(k: int) -> Gadget:
    """1-1 transmitter for (1,1,k): spine with a double triangle in the middle."""
    if k < 2:
        raise ValueError("L_k needs k >= 2")
    b = GraphBuilder(1)
    spine = _path(b, 0, k - 2)
    _, _, e, _ = _triangle_pair(b, spine[-1])
    tail = _path(b, e, k - 2)
    end = b.add_vertex()
    b.add_edge(tail[-1], end)
    return Gadget(f"L_{k}", SList((1, 1, k)), _finish(b, (0, end)), (0, end),
                  GadgetRole(TRANSMITTER, 1, 2), {"k": k})


def build_J_k(k: int) -> Gadget:
    """1-1 antitransmitter for (1,1,k): two double triangles in series."""
    if k < 2:
        raise ValueError("J_k needs k >= 2")
    b = GraphBuilder(1)
    spine = _path(b, 0, k - 2)
    _, _, e, _ = _triangle_pair(b, spine[-1])
    mid = _path(b, e, 2 * (k - 2))
    _, _, e, _ = _triangle_pair(b, mid[-1])
    tail = _path(b, e, k - 2)
    end = b.add_vertex()
    b.add_edge(tail[-1], end)
    return Gadget(f"J_{k}", SList((1, 1, k)), _finish(b, (0, end)), (0, end),
                  GadgetRole(ANTITRANSMITTER, 1, 2), {"k": k})


def build_H_k(k: int) -> Gadget:
    """1-1 clause simulator for (1,1,k) on 9k vertices.

    Each side runs corner, k-2 internals, a triangle (two spine vertices and an
    apex), k-2 internals, one extra vertex, far corner. The extras hang next to
    corner 0 on side 2->0, next to 1 on side 0->1 and next to 2 on side 1->2,
    and each reaches its own vertex of a central triangle through k-2 internals.
    """
    if k < 2:
        raise ValueError("H_k needs k >= 2")
    b = GraphBuilder(3)
    extras = []
    for start, end in ((2, 0), (0, 1), (1, 2)):
        head = _path(b, start, k - 2)
        p, q, t = b.add_vertices(3)
        b.add_path([head[-1], p, q])
        b.add_edge(t, p)
        b.add_edge(t, q)
        tail = _path(b, q, k - 2)
        x = b.add_vertex()
        b.add_path([tail[-1], x, end])
        extras.append(x)
    centre = b.add_vertices(3)
    for a, c in itertools.combinations(centre, 2):
        b.add_edge(a, c)
    for x, c in zip(extras, centre):
        _path(b, x, k - 2, c)
    return Gadget(f"H_{k}", SList((1, 1, k)), _finish(b, (0, 1, 2)), (0, 1, 2),
                  GadgetRole(CLAUSE, 1, 2), {"k": k})


def build_N_k(k: int) -> Gadget:
    """Cubic-completion widget: every vertex has degree 3 except the entry x_u (degree 2).

    ceil((k-2)/4) units entry-K_{2,2}-exit in series, then a 5-vertex closing block.
    """
    if k < 2:
        raise ValueError("N_k needs k >= 2")
    b = GraphBuilder(0)
    units = math.ceil((k - 2) / 4)
    prev = None
    entry = None
    for _ in range(units):
        en, a1, a2, b1, b2, ex = b.add_vertices(6)
        for a in (a1, a2):
            b.add_edge(en, a)
            b.add_edge(a, b1)
            b.add_edge(a, b2)
        b.add_edge(b1, ex)
        b.add_edge(b2, ex)
        if prev is not None:
            b.add_edge(prev, en)
        entry = en if entry is None else entry
        prev = ex
    f, p1, p2, q1, q2 = b.add_vertices(5)
    if prev is not None:
        b.add_edge(prev, f)
    entry = f if entry is None else entry
    for p in (p1, p2):
        b.add_edge(f, p)
        b.add_edge(p, q1)
        b.add_edge(p, q2)
    b.add_edge(q1, q2)
    b.labels[entry] = "x_u"
    return Gadget(f"N_{k}", SList((1, 1, k)), b.build(), (entry,), None, {"k": k})


# --- (2,2,3,3) ------------------------------------------------------------

def _spine_with_tails(length: int, tails: Sequence[int]) -> GraphBuilder:
    b = GraphBuilder(length)
    b.add_path(range(length))
    for v in tails:
        _path(b, v, 2)
    return b


def build_Lp_2233() -> Gadget:
    """P_11 with 2-vertex tails hanging from positions 4 and 7."""
    b = _spine_with_tails(11, (4, 7))
    return Gadget("Lp_2233", SList((2, 2, 3, 3)), _finish(b, (0, 10)), (0, 10),
                  GadgetRole(TRANSMITTER, 3, 4))


def build_Jp_2233() -> Gadget:
    """P_8 with a 2-vertex tail hanging from position 4."""
    b = _spine_with_tails(8, (4,))
    return Gadget("Jp_2233", SList((2, 2, 3, 3)), _finish(b, (0, 7)), (0, 7),
                  GadgetRole(ANTITRANSMITTER, 3, 4))


def build_Hp_2233() -> Gadget:
    """39-cycle through corners 0,1,2 (12 internals per side) plus two 2-vertex tails.

    Sides are 0->2 (left), 1->2 (right), 0->1 (bottom); the tails hang from the
    left vertex at distance 3 from corner 0 and the right vertex at distance 3
    from corner 1.
    """
    b = GraphBuilder(3)
    left = _path(b, 0, 12, 2)
    right = _path(b, 1, 12, 2)
    _path(b, 0, 12, 1)
    _path(b, left[3], 2)
    _path(b, right[3], 2)
    return Gadget("Hp_2233", SList((2, 2, 3, 3)), _finish(b, (0, 1, 2)), (0, 1, 2),
                  GadgetRole(CLAUSE, 3, 4))


# --- multiplicity-based machinery -----------------------------------------

def _check_iS(i: int, s: SList) -> None:
    if i < 2:
        raise ValueError("construction needs i > 1")
    if len(s) < i + 1 or s[0] != i or s[i] != i:
        raise ValueError(f"construction needs s_1 = s_(i+1) = i, got {s}")
    if len(s) < math.ceil(3 * i / 2):
        raise ValueError(f"construction needs |S| >= ceil(3i/2) = {math.ceil(3 * i / 2)}")


@dataclass(frozen=True)
class RankedGraph:
    graph: Graph
    rank: tuple[int, ...]
    layer: tuple[int, ...]
    m: int


def l_iS_ranks(i: int, s) -> dict[int, int]:
    """Number of vertices at each rank of L_{i,S}."""
    s = as_slist(s)
    _check_iS(i, s)
    m = math.prod(v + 1 for v in set(s))
    minus = s.count(i) - i - 1
    size = {j: 1 for j in range(-m, m + 1)}
    if minus > 0:
        for j in range(-m, m + 1):
            if j % (i + 1) == (i + 1) // 2:
                size[j] += minus
    for kk in sorted(set(s)):
        if kk > i:
            for j in range(-m + 1, m):
                if j % (kk + 1) == 0:
                    size[j] += s.count(kk)
    return size


def ranked_L_iS(i: int, s) -> RankedGraph:
    size = l_iS_ranks(i, s)
    m = max(size)
    rank, layer = [], []
    members: dict[int, list[int]] = {}
    for j in range(-m, m + 1):
        for l in range(size[j]):
            members.setdefault(j, []).append(len(rank))
            rank.append(j)
            layer.append(l)
    edges = []
    for j in range(-m, m + 1):
        vs = members[j]
        edges += itertools.combinations(vs, 2)
        if j < m:
            edges += itertools.product(vs, members[j + 1])
    return RankedGraph(Graph.from_edges(len(rank), edges), tuple(rank), tuple(layer), m)


def build_L_iS(i: int, s) -> Gadget:
    """Rank-layered chain; connectors are the single vertices of ranks -m and m."""
    s = as_slist(s)
    rg = ranked_L_iS(i, s)
    lo, hi = 0, rg.graph.n - 1
    g = rg.graph.with_labels({lo: "conn1", hi: "conn2"})
    return Gadget(f"L_{i},{s}", s, g, (lo, hi), None,
                  {"rank": rg.rank, "layer": rg.layer, "m": rg.m})


def build_R_iS(i: int, s) -> Gadget:
    """Tripod whose three arm tips are pairwise at distance i+1 on |S|+2 vertices."""
    s = as_slist(s)
    _check_iS(i, s)
    b = GraphBuilder(1)
    centre = 0
    if i % 2:
        arm = (i + 1) // 2
        tips = [_path(b, centre, arm)[-1] for _ in range(3)]
        hubs = [centre]
        extra = len(s) - math.ceil(3 * i / 2)
    else:
        c1 = _path(b, centre, i // 2)[-1]
        x, y = b.add_vertices(2)
        b.add_edge(centre, x)
        b.add_edge(centre, y)
        b.add_edge(x, y)
        c2 = _path(b, x, i // 2)[-1]
        c3 = _path(b, y, i // 2)[-1]
        tips = [c1, c2, c3]
        hubs = [centre, x, y]
        extra = len(s) - 3 * i // 2 - 1
    if extra < 0:
        raise ValueError(f"|S| = {len(s)} too small for R at i={i}")
    for _ in range(extra):
        w = b.add_vertex()
        for h in hubs:
            b.add_edge(w, h)
    g = _finish(b, tips)
    if g.n != len(s) + 2:
        raise AssertionError("R construction size drifted")
    return Gadget(f"R_{i},{s}", s, g, tuple(tips), None)


def build_G_d(i: int, s, d: int) -> Gadget:
    """Ring of d copies of L and d copies of R; connectors are the free R tips."""
    if d < 1:
        raise ValueError("d must be positive")
    s = as_slist(s)
    L, R = build_L_iS(i, s), build_R_iS(i, s)
    b = GraphBuilder(0)
    lmaps = [b.add_copy(L.graph, tag=f"L{t}") for t in range(d)]
    originals = []
    for t in range(d):
        nxt = lmaps[(t + 1) % d]
        attach = {R.connectors[1]: lmaps[t][L.connectors[1]],
                  R.connectors[2]: nxt[L.connectors[0]]}
        rmap = b.add_copy(R.graph, attach, tag=f"R{t}")
        originals.append(rmap[R.connectors[0]])
    for idx, v in enumerate(originals, 1):
        b.labels[v] = f"conn{idx}"
    return Gadget(f"G_{d}", s, b.build(), tuple(originals), None, {"tags": dict(b.tags)})


def build_J_iS(i: int, s) -> Gadget:
    """Two L copies bridged by R, with one far end deleted.

    ``meta['rank_condition']`` records whether the vertex next to the deleted
    end sits on a rank holding exactly two vertices; the construction never
    depends on it.
    """
    s = as_slist(s)
    rg = ranked_L_iS(i, s)
    L, R = build_L_iS(i, s), build_R_iS(i, s)
    b = GraphBuilder(0)
    m1 = b.add_copy(L.graph, tag="L1")
    m2 = b.add_copy(L.graph, tag="L2")
    b.add_copy(R.graph, {R.connectors[1]: m1[L.connectors[1]],
                         R.connectors[2]: m2[L.connectors[0]]}, tag="R")
    u = m1[L.connectors[0]]
    v = m2[L.connectors[1]]
    nbrs = [x for e in b.edges if v in e for x in e if x != v]
    if len(nbrs) != 1:
        raise AssertionError("deleted end must have degree 1")
    w = nbrs[0]
    w_rank = rg.rank[m2.index(w)]
    cond = sum(1 for r in rg.rank if r == w_rank) == 2
    b.remove_vertex(v)
    shift = lambda x: x - 1 if x > v else x
    u, w = shift(u), shift(w)
    b.labels[u] = "conn1"
    b.labels[w] = "conn2"
    return Gadget(f"J_{i},{s}", s, b.build(), (u, w), None,
                  {"rank_condition": cond, "tags": dict(b.tags)})


# --- catalog --------------------------------------------------------------

_FIXED = {
    "L_122": build_L_122, "J_122": build_J_122, "H_122": build_H_122,
    "Lp_2233": build_Lp_2233, "Jp_2233": build_Jp_2233, "Hp_2233": build_Hp_2233,
}
_PARAM = {"L": build_L_k, "J": build_J_k, "H": build_H_k, "N": build_N_k}

CATALOG = ["L_122", "J_122", "H_122", "L_k", "J_k", "H_k", "N_k",
           "Lp_2233", "Jp_2233", "Hp_2233"]


def build_named_gadget(name: str, k: int | None = None) -> Gadget:
    """Catalog lookup; parametrized entries accept ``L_k`` with ``k=`` or ``L_3`` directly."""
    if name in _FIXED:
        return _FIXED[name]()
    head, _, tail = name.partition("_")
    if head in _PARAM and tail:
        if tail == "k":
            if k is None:
                raise ValueError(f"{name} needs a value for k")
            return _PARAM[head](k)
        if tail.isdigit():
            return _PARAM[head](int(tail))
    raise ValueError(f"unknown gadget '{name}'; known: {', '.join(CATALOG)}")


# --- verification ---------------------------------------------------------

@dataclass
class GadgetReport:
    name: str
    universal_ok: bool
    existential_ok: bool
    inconclusive: bool = False
    counterexample: tuple | None = None
    failing_config: tuple | None = None
    forces_radii: bool | None = None
    universal_bare_ok: bool | None = None
    forces_radii_bare: bool | None = None
    colorable_configs_ok: bool | None = None
    nodes: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.universal_ok and self.existential_ok and not self.inconclusive


def padded_context(gadget: Gadget, degree: int = 3, tail: int = 2) -> Graph:
    """The gadget with 2-vertex tails hung on each connector until it reaches ``degree``.

    Every assembly that gives connectors degree ``degree`` through external
    branches of depth >= ``tail`` contains this graph as a subgraph on the
    same gadget vertices, so an uncolorable configuration here stays
    uncolorable there.  The first ``gadget.graph.n`` ids are unchanged.
    """
    g = gadget.graph
    b = GraphBuilder(g.n)
    b.edges = set(g.edges)
    for x in gadget.connectors:
        for _ in range(max(0, degree - g.degree(x))):
            _path(b, x, tail)
    return b.build()


def _clearance(gadget: Gadget, config: Sequence[int], dist) -> set[tuple[int, int]]:
    """Forbidden (vertex, class) pairs: a class other than the connector's stays beyond half its radius."""
    s, out = gadget.s, set()
    for x, cx in zip(gadget.connectors, config):
        for y in range(gadget.graph.n):
            if y == x:
                continue
            dy = dist(x, y)
            if dy < 0:
                continue
            for c in range(1, len(s) + 1):
                if c != cx and dy <= s[c - 1] // 2:
                    out.add((y, c))
    return out


def verify_gadget(gadget: Gadget, budget: int = DEFAULT_BUDGET) -> GadgetReport:
    """Check a declared role by exhaustive constrained search.

    Universal part: padded to degree 3 (see ``padded_context``), no connector
    can leave the role's two classes and every illegal configuration of those
    classes is uncolorable; the unpadded graph is checked too and reported
    separately.  Existential part: every legal configuration of the
    bare gadget has a coloring meeting the clearance condition.
    """
    role = gadget.role
    if role is None:
        raise ValueError(f"{gadget.name} has no declared role")
    conns = gadget.connectors
    bare = gadget.graph
    padded = padded_context(gadget)
    dists = {id(bare): all_pairs_distances(bare), id(padded): all_pairs_distances(padded)}
    pair = (role.i, role.j)
    rep = GadgetReport(gadget.name, True, True)

    def run(g, cs):
        v = solve_constrained(g, gadget.s, cs, budget, dists[id(g)])
        rep.nodes += v.nodes
        if v.aborted:
            rep.inconclusive = True
        return v

    configs = list(itertools.product(pair, repeat=role.arity))
    legal = [c for c in configs if role.legal(c)]
    illegal = [c for c in configs if not role.legal(c)]

    def universal(g):
        for config in illegal:
            v = run(g, ConstraintSet(fixed=dict(zip(conns, config))))
            if v.status is Status.COLORABLE:
                return False, config, v.coloring
        return True, None, None

    def forcing(g):
        others = [c for c in range(1, len(gadget.s) + 1) if c not in pair]
        return all(run(g, ConstraintSet(fixed={x: c})).status is Status.NOT_COLORABLE
                   for x in conns for c in others)

    ok, config, witness = universal(padded)
    if not ok:
        rep.universal_ok = False
        rep.failing_config, rep.counterexample = config, witness
        rep.notes.append(f"illegal configuration {config} is colorable")
    rep.universal_bare_ok, bare_config, _ = universal(bare)
    if not rep.universal_bare_ok:
        rep.notes.append(f"without padding, illegal configuration {bare_config} is colorable")
    rep.forces_radii = forcing(padded)
    rep.forces_radii_bare = forcing(bare)
    if not rep.forces_radii:
        rep.universal_ok = False
        rep.notes.append("a connector can take a class outside the role's pair")

    dist = dists[id(bare)]
    plain_ok = True
    for config in legal:
        fixed = dict(zip(conns, config))
        if run(bare, ConstraintSet(fixed=fixed)).status is not Status.COLORABLE:
            plain_ok = False
        v = run(bare, ConstraintSet(fixed=fixed, forbidden=_clearance(gadget, config, dist)))
        if v.status is not Status.COLORABLE and rep.existential_ok:
            rep.existential_ok = False
            rep.failing_config = rep.failing_config or config
            rep.notes.append(f"legal configuration {config} has no coloring with clearance")
    rep.colorable_configs_ok = plain_ok
    if rep.inconclusive:
        rep.notes.append("budget exhausted on at least one query")
    return rep
