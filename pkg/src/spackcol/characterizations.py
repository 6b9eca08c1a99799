"""Polynomial-side results: (1,2,2) trees, Y_n obstructions, witness builds, classification."""
from __future__ import annotations

import itertools
import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import networkx as nx

from .graph import (Graph, GraphBuilder, GraphFormatError, MultiGraph, all_pairs_distances, bipartition,
                    build_spider_y, contains_subtree, is_tree, read_graph, read_multigraph)
from .solver import (SList, SolverAborted, Status, as_slist, slist_leq, solve,
                     verify_coloring)

S122 = SList((1, 2, 2))


# --- the forbidden family ----------------------------------------------------

def _caterpillar(spine: int, pendants: Sequence[int]) -> Graph:
    b = GraphBuilder(spine)
    b.add_path(range(spine))
    for p in pendants:
        b.add_edge(p, b.add_vertex())
    return b.build()


def family_T0() -> Graph:
    """P_5 with a pendant on each of its three inner vertices."""
    return _caterpillar(5, (1, 2, 3))


def family_T1() -> Graph:
    """P_8 with pendants on spine positions 1, 2, 5 and 6 (0-based)."""
    return _caterpillar(8, (1, 2, 5, 6))


def extend_at(t: Graph, u: int, v: int) -> Graph:
    """Replace the edge uv by u-u1-u2-u3-v and hang a leaf w on u2."""
    if not t.has_edge(u, v) or t.degree(u) != 2 or t.degree(v) != 2:
        raise ValueError(f"{u}{v} is not an edge between two degree-2 vertices")
    n = t.n
    u1, u2, u3, w = n, n + 1, n + 2, n + 3
    edges = set(t.edges) - {(min(u, v), max(u, v))}
    edges |= {(u, u1), (u1, u2), (u2, u3), (v, u3), (u2, w)}
    return Graph.from_edges(n + 4, edges)


def _dedup(graphs: Iterable[Graph]) -> list[Graph]:
    buckets: dict[str, list] = {}
    out = []
    for g in graphs:
        ng = g.to_networkx()
        key = nx.weisfeiler_lehman_graph_hash(ng)
        seen = buckets.setdefault(key, [])
        if any(nx.is_isomorphic(ng, h) for h in seen):
            continue
        seen.append(ng)
        out.append(g)
    return out


def generate_family_T(max_n: int) -> list[Graph]:
    """Members of the forbidden family with at most ``max_n`` vertices, sorted by size."""
    if max_n < 8:
        raise ValueError("max_n must be at least 8")
    layer = _dedup(t for t in (family_T0(), family_T1()) if t.n <= max_n)
    members = list(layer)
    while layer:
        nxt = []
        for t in layer:
            if t.n + 4 > max_n:
                continue
            for u, v in t.sorted_edges():
                if t.degree(u) == 2 and t.degree(v) == 2:
                    nxt.append(extend_at(t, u, v))
        layer = _dedup(nxt)
        members = _dedup(members + layer)
    return sorted(members, key=lambda g: g.n)


@lru_cache(maxsize=None)
def _family_upto(max_n: int) -> tuple[Graph, ...]:
    return tuple(generate_family_T(max(8, max_n)))


# --- (1,2,2) trees -----------------------------------------------------------

@dataclass(frozen=True)
class ForbiddenTreeWitness:
    member: Graph
    embedding: dict

    def __post_init__(self):
        if len(set(self.embedding.values())) != len(self.embedding):
            raise ValueError("embedding is not injective")


@dataclass
class TreeResult:
    status: Status
    coloring: tuple | None = None
    witness: ForbiddenTreeWitness | None = None
    method: str = ""

    @property
    def colorable(self) -> bool:
        return self.status is Status.COLORABLE


def _conflicts(t: Graph, col: list, trial: dict) -> bool:
    """True when a tentative assignment clashes with itself or with ``col``."""
    get = lambda x: trial.get(x, col[x])
    for v, c in trial.items():
        if c == 1:
            if any(get(w) == 1 for w in t.adj[v]):
                return True
            continue
        seen = {v}
        frontier = [v]
        for _ in range(2):
            nxt = []
            for x in frontier:
                for w in t.adj[x]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
                        if get(w) == c:
                            return True
            frontier = nxt
    return False


def _chain(t: Graph, v: int, x: int) -> list[int]:
    """Walk from v through x along degree-2 vertices; the returned list ends at
    the first vertex whose degree is not 2."""
    out = [x]
    prev, cur = v, x
    while t.degree(cur) == 2:
        nxt = t.adj[cur][0] if t.adj[cur][0] != prev else t.adj[cur][1]
        prev, cur = cur, nxt
        out.append(cur)
    return out


def _alternating(length: int, c: int, d: int) -> list[int]:
    # 1, d, 1, c, 1, d, ...
    return [1 if j % 2 else (d if j % 4 == 2 else c) for j in range(1, length + 1)]


def _skeleton_pattern(i: int, c: int, d: int, slot_at_end: bool) -> list[int]:
    """Classes for the i-1 inner vertices plus the far 3-vertex."""
    if i % 2 == 0:
        return _alternating(i, c, d)
    if i == 3:
        # the 2-class inner vertex sits next to whichever end owns the slot
        return [1, d, c] if slot_at_end else [d, 1, c]
    tail = [1 if j % 2 == 0 else (c if (j - 3) % 4 == 0 else d) for j in range(3, i + 1)]
    return [1, d] + tail


def _orient_short_gaps(t: Graph, heavy: list[int], partner: dict) -> dict | None:
    """Decide, for every gap of length 3 between 3-vertices, which end receives
    the 2-class neighbor. A 3-vertex has room for one such neighbor, and a
    3-vertex with a 3-vertex neighbor has none left."""
    deg = t.degrees
    nbrs: dict[int, list[int]] = {v: [] for v in heavy}
    for v in heavy:
        for x in t.adj[v]:
            if deg[x] == 2:
                path = _chain(t, v, x)
                if len(path) == 3 and deg[path[-1]] >= 3:
                    nbrs[v].append(path[-1])
    owner = {}
    seen = set()
    for comp_root in heavy:
        if comp_root in seen:
            continue
        comp = [comp_root]
        seen.add(comp_root)
        for u in comp:
            for w in nbrs[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
        full = [v for v in comp if v in partner]
        if len(full) > 1:
            return None
        root = full[0] if full else comp_root
        stack, done = [root], {root}
        while stack:
            u = stack.pop()
            for w in nbrs[u]:
                if w not in done:
                    done.add(w)
                    owner[frozenset((u, w))] = w
                    stack.append(w)
    return owner


def _path_extension(t: Graph) -> list[int] | None:
    """Constructive coloring along paths between 3-vertices; None if it gets stuck."""
    n = t.n
    col = [0] * n
    deg = t.degrees
    heavy = [v for v in range(n) if deg[v] >= 3]
    partner = {}
    for v in heavy:
        ps = [w for w in t.adj[v] if deg[w] >= 3]
        if len(ps) > 1:
            return None
        if ps:
            partner[v] = ps[0]
    owner = _orient_short_gaps(t, heavy, partner)
    if owner is None:
        return None
    if not heavy:
        if n == 1:
            return [1]
        start = next(v for v in range(n) if deg[v] <= 1)
        order = [start] + _chain(t, start, t.adj[start][0])
        for v, c in zip(order, [1 if j % 2 == 0 else (2 if j % 4 == 1 else 3) for j in range(n)]):
            col[v] = c
        return col
    queue = deque()

    def place(v, c):
        col[v] = c
        queue.append(v)
        p = partner.get(v)
        if p is not None and not col[p]:
            col[p] = 5 - c
            queue.append(p)

    place(heavy[0], 2)
    while queue:
        v = queue.popleft()
        c = col[v]
        d = 5 - c
        for x in t.adj[v]:
            if col[x]:
                continue
            path = _chain(t, v, x)
            end = path[-1]
            if deg[end] >= 3:
                pattern = _skeleton_pattern(len(path), c, d, owner.get(frozenset((v, end))) == end)
            else:
                pattern = _alternating(len(path), c, d)
            trial = dict(zip(path, pattern))
            if _conflicts(t, col, trial):
                return None
            for y, cl in trial.items():
                col[y] = cl
            if deg[end] >= 3:
                place(end, col[end])
    return col


def _tree_dp(t: Graph) -> list[int] | None:
    """Exact (1,2,2) search by dynamic programming on the rooted tree."""
    n = t.n
    parent = [-1] * n
    order = [0]
    seen = [False] * n
    seen[0] = True
    for u in order:
        for w in t.adj[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                order.append(w)
    children = [[w for w in t.adj[u] if w != parent[u]] for u in range(n)]
    # ok[v][(cv, cp)] = True when the subtree of v admits a coloring with v in cv, parent in cp
    ok: list[dict] = [dict() for _ in range(n)]
    pick: list[dict] = [dict() for _ in range(n)]

    def child_classes(c, cv, cp):
        if c == 1:
            return cv != 1
        return c != cv and c != cp

    for v in reversed(order):
        for cv in (1, 2, 3):
            for cp in (0, 1, 2, 3):
                if cv == cp:
                    ok[v][(cv, cp)] = False
                    continue
                options = []
                for w in children[v]:
                    options.append([c for c in (1, 2, 3)
                                    if child_classes(c, cv, cp) and ok[w].get((c, cv))])
                assign = _assign_children(options)
                ok[v][(cv, cp)] = assign is not None
                if assign is not None:
                    pick[v][(cv, cp)] = assign
    root_c = next((c for c in (1, 2, 3) if ok[0][(c, 0)]), None)
    if root_c is None:
        return None
    col = [0] * n
    col[0] = root_c
    for v in order:
        cp = col[parent[v]] if parent[v] >= 0 else 0
        for w, c in zip(children[v], pick[v][(col[v], cp)]):
            col[w] = c
    return col


def _assign_children(options: list[list[int]]) -> list[int] | None:
    """Give each child a class; classes 2 and 3 may each be used at most once."""
    must = [i for i, o in enumerate(options) if 1 not in o]
    if any(not o for o in options) or len(must) > 2:
        return None
    out = [1] * len(options)
    for choice in itertools.permutations((2, 3), len(must)):
        if all(c in options[i] for i, c in zip(must, choice)):
            for i, c in zip(must, choice):
                out[i] = c
            return out
    return None


def tree_122_check(t: Graph) -> TreeResult:
    """Decide (1,2,2)-colorability of a tree, with a coloring or a forbidden subtree."""
    if not is_tree(t):
        raise ValueError("input is not a tree")
    if t.n >= 8:
        for member in _family_upto(t.n):
            if member.n > t.n:
                break
            emb = contains_subtree(t, member)
            if emb is not None:
                return TreeResult(Status.NOT_COLORABLE, witness=ForbiddenTreeWitness(member, emb),
                                  method="forbidden-subtree")
    col, method = _path_extension(t), "path-extension"
    if col is None or not verify_coloring(t, S122, col):
        col, method = _tree_dp(t), "tree-dp"
    if col is None:
        return TreeResult(Status.NOT_COLORABLE, method=method)
    coloring = tuple(col)
    chk = verify_coloring(t, S122, coloring)
    assert chk, f"constructed coloring is invalid: {chk.violation}"
    return TreeResult(Status.COLORABLE, coloring=coloring, method=method)


# --- Y_n obstructions --------------------------------------------------------

def yn_obstruction(s, max_n: int, budget: int | None = None) -> int | None:
    """Smallest n <= max_n with Y_n not S-colorable, or None."""
    if max_n < 1:
        raise ValueError("max_n must be positive")
    s = as_slist(s)
    kw = {} if budget is None else {"budget": budget}
    for n in range(1, max_n + 1):
        v = solve(build_spider_y(n), s, **kw)
        if v.aborted:
            raise SolverAborted(f"Y_{n} undecided within budget")
        if not v.colorable:
            return n
    return None


# --- classification ---------------------------------------------------------

class Complexity:
    POLYNOMIAL = "polynomial"
    NP_COMPLETE = "np-complete"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Classification:
    verdict: str
    evidence: tuple[str, ...] = ()

    def __post_init__(self):
        if self.verdict != Complexity.UNKNOWN and not self.evidence:
            raise ValueError("a decided classification needs evidence")


POLY_MAXIMA = (SList((2, 3, 3, 3)), SList((2, 2, 3, 4)), SList((1, 4, 4, 4)), SList((1, 2, 5, 6)))
CLIQUE_LIFT_BASE = SList((1, 3, 5, 5))


def _fmt(s) -> str:
    return "(" + ",".join(map(str, s)) + ")"


def _sharp_rule(s: SList) -> str | None:
    i = s[0]
    if i > 1 and len(s) >= math.ceil(3 * i / 2) and len(s) > i and s[i] == i:
        return f"thm3.4 s_1=s_{i + 1}={i} and |S|>={math.ceil(3 * i / 2)}"
    return None


def _lift_sources(s: SList) -> list[tuple[str, SList]]:
    """Shorter lists whose hardness transfers to ``s`` through one lift."""
    out = []
    if len(s) >= 4 and s[1] == 1 and s[-1] >= s[-2]:
        out.append(("prop3.5", SList(s[:-1])))
    if len(s) >= 2 and s[0] == 1:
        base = [x // 2 for x in s[1:]]
        if base[0] >= 1 and all(a <= b for a, b in zip(base, base[1:])):
            out.append(("prop3.7", SList(base)))
    return out


def _npc_rules(s: SList) -> list[str]:
    """Hardness rules that fire for ``s`` (lifts resolve recursively)."""
    ev = []
    if len(s) >= 3 and s[0] == 1 and s[1] == 1:
        ev.append("cor3.2 s_1=s_2=1 and |S|>=3")
    rule = _sharp_rule(s)
    if rule:
        ev.append(rule)
    if len(s) == 4 and s[:3] == (2, 2, 2):
        ev.append("cor3.1 (2,2,2,k)")
    if len(s) == 4 and slist_leq(CLIQUE_LIFT_BASE, s):
        ev.append(f"cor3.3 {_fmt(s)} >= (1,3,5,5)")
    for name, base in _lift_sources(s):
        if classify(base).verdict == Complexity.NP_COMPLETE:
            ev.append(f"{name} lift of {_fmt(base)}")
    return ev


def _poly_rules(s: SList) -> list[str]:
    ev = []
    i = s[0]
    if i > 1 and len(s) < math.ceil(3 * i / 2):
        ev.append(f"prop3.1 s_1={i} and |S|<{math.ceil(3 * i / 2)}")
    if len(s) == 4:
        for top in POLY_MAXIMA:
            if slist_leq(s, top):
                ev.append(f"thm3.1 {_fmt(s)} <= {_fmt(top)}")
    return ev


@lru_cache(maxsize=4096)
def _classify(s: SList, obstruction_n: int) -> Classification:
    k = len(s)
    if k == 1:
        return Classification(Complexity.POLYNOMIAL, ("trivial |S|=1",))
    if k == 2:
        return Classification(Complexity.POLYNOMIAL, ("thm2.2 |S|=2",))
    if k == 3:
        if (s[0], s[1]) == (1, 1) or s == (1, 2, 2):
            return Classification(Complexity.NP_COMPLETE, (f"thm2.2 {_fmt(s)}",))
        return Classification(Complexity.POLYNOMIAL, (f"thm2.2 {_fmt(s)}",))
    if k == 4:
        poly = _poly_rules(s)
        hard = _npc_rules(s)
        if any(p.startswith("thm3.1") for p in poly):
            assert not hard, f"hardness rule contradicts the |S|=4 dichotomy: {hard}"
            return Classification(Complexity.POLYNOMIAL, tuple(poly))
        assert not any(slist_leq(s, top) for top in POLY_MAXIMA)
        assert not poly, f"polynomial rule contradicts the |S|=4 dichotomy: {poly}"
        return Classification(Complexity.NP_COMPLETE, (f"thm3.1 {_fmt(s)}",) + tuple(hard))
    poly = _poly_rules(s)
    if poly:
        return Classification(Complexity.POLYNOMIAL, tuple(poly))
    hard = _npc_rules(s)
    if hard:
        return Classification(Complexity.NP_COMPLETE, tuple(hard))
    if obstruction_n:
        n = yn_obstruction(s, obstruction_n)
        if n is not None:
            return Classification(Complexity.POLYNOMIAL, (f"prop3.2 Y_{n} is not S-colorable",))
    return Classification(Complexity.UNKNOWN)


def classify(s, obstruction_n: int = 6) -> Classification:
    """Complexity of S-COL. Total for |S| <= 4, partial beyond.

    ``obstruction_n`` bounds the Y_n scan used as a last resort for long lists.
    """
    return _classify(as_slist(s), obstruction_n)


GRAPH_CLASSES = ("arbitrary", "subcubic", "cubic", "bipartite", "tree")

_TABLE = {
    "111": {"arbitrary": "np-complete", "subcubic": "polynomial", "cubic": "polynomial",
            "bipartite": "polynomial", "tree": "polynomial"},
    "122": {"arbitrary": "np-complete", "subcubic": "np-complete", "cubic": "polynomial",
            "bipartite": "np-complete", "tree": "polynomial"},
    "11k": {"arbitrary": "np-complete", "subcubic": "np-complete", "cubic": "np-complete",
            "bipartite": "polynomial", "tree": "polynomial"},
}


def classify_graph_class(s, cls: str) -> Classification:
    """Lookup in the |S|=3 complexity table by graph class."""
    s = as_slist(s)
    if cls not in GRAPH_CLASSES:
        raise ValueError(f"unknown graph class {cls!r}; expected one of {GRAPH_CLASSES}")
    if s == (1, 1, 1):
        row = "111"
    elif s == (1, 2, 2):
        row = "122"
    elif len(s) == 3 and s[:2] == (1, 1) and s[2] >= 2:
        row = "11k"
    else:
        raise ValueError(f"{_fmt(s)} is not covered by the table")
    return Classification(_TABLE[row][cls], (f"table1 {_fmt(s)} {cls}",))


# --- witness constructions ---------------------------------------------------

class WitnessError(ValueError):
    """A witness script breaks a side condition of its regime."""


OPS = ("leaf", "add2", "add3", "add35", "add36", "add25", "identify")


@dataclass(frozen=True)
class Op:
    name: str
    target: str
    sizes: tuple[int, ...] = ()
    count: int = 1
    variant: str = ""


@dataclass
class BipartitWitness:
    """A base graph plus an operation script.

    ``regime`` is ``cover`` (vertex cover of size <= 3), ``pair`` (edges all
    touch u or v) or ``bipartite`` (subdivided bipartite multigraph).
    """
    regime: str
    base: Graph | MultiGraph
    cover: tuple[int, ...] = ()
    side_a: frozenset = frozenset()
    subdivided: tuple[tuple[int, int, int], ...] | None = None
    ops: list[Op] = field(default_factory=list)


def witness_regime(s) -> str:
    """``1-3`` or ``1-2`` depending on the second entry; raise outside both families."""
    s = as_slist(s)
    if len(s) != 4 or s[0] != 1 or s[1] not in (2, 3) or not (5 <= s[2] <= 7 and 6 <= s[3] <= 7):
        raise WitnessError(f"{_fmt(s)} is neither (1,3,k,k') nor (1,2,k,k') with 5<=k<=7, 6<=k'<=7")
    return "1-3" if s[1] == 3 else "1-2"


class _Build:
    """Graph under construction, with a class for every vertex."""

    def __init__(self, s: SList):
        self.s = s
        self.b = GraphBuilder()
        self.cls: list[int] = []

    def vertex(self, cl: int) -> int:
        self.cls.append(cl)
        return self.b.add_vertex()

    def independent(self, u: int, w: int, size: int, both: bool):
        for _ in range(size):
            x = self.vertex(1)
            self.b.add_edge(u, x)
            if both:
                self.b.add_edge(w, x)

    def add3(self, u: int, size: int, cl: int = 2) -> int:
        if size < 1:
            raise WitnessError("a 3-add needs a nonempty independent set to reach w")
        w = self.vertex(cl)
        self.independent(u, w, size, True)
        return w

    def add2(self, u: int, size: int, cl: int = 2) -> int:
        w = self.vertex(cl)
        self.b.add_edge(u, w)
        self.independent(u, w, size, True)
        return w

    def big_other(self, u: int) -> int:
        if self.cls[u] not in (3, 4):
            raise WitnessError(f"vertex {u} is not colored by k or k'")
        return 7 - self.cls[u]


def _target(ref: str, names: dict) -> int:
    if ref not in names:
        raise WitnessError(f"unknown vertex reference {ref!r}")
    return names[ref]


def build_from_witness(w: BipartitWitness, s) -> tuple[Graph, tuple]:
    """Build the witnessed graph together with its coloring; the coloring is verified."""
    s = as_slist(s)
    regime = witness_regime(s)
    k, kp = s[2], s[3]
    bld = _Build(s)
    names: dict[str, int] = {}
    kinds: dict[int, str] = {}
    g0 = w.base
    if w.regime == "cover":
        if isinstance(g0, MultiGraph):
            g0 = g0.underlying()
        cover = list(w.cover)
        if len(cover) > 3 or any(u not in cover and v not in cover for u, v in g0.edges):
            raise WitnessError("cover regime needs a vertex cover of size at most 3")
        if w.ops:
            raise WitnessError("the cover regime takes no operations")
        for v in range(g0.n):
            names[str(v)] = bld.vertex(cover.index(v) + 2 if v in cover else 1)
        for a, b in g0.edges:
            bld.b.add_edge(a, b)
    elif w.regime == "pair":
        if isinstance(g0, MultiGraph):
            g0 = g0.underlying()
        if len(w.cover) != 2:
            raise WitnessError("pair regime needs exactly two cover vertices u v")
        u, v = w.cover
        if any(a not in (u, v) and b not in (u, v) for a, b in g0.edges):
            raise WitnessError(f"{{{u},{v}}} is not a vertex cover of the base")
        for x in range(g0.n):
            names[str(x)] = bld.vertex(3 if x == u else 4 if x == v else 1)
        for a, b in g0.edges:
            bld.b.add_edge(a, b)
        _pair_ops(bld, w.ops, names, names[str(u)], names[str(v)], g0.has_edge(u, v), regime)
    elif w.regime == "bipartite":
        _bipartite_build(bld, w, names, kinds, regime, k, kp)
    else:
        raise WitnessError(f"unknown regime {w.regime!r}")
    g = bld.b.build()
    coloring = tuple(bld.cls)
    chk = verify_coloring(g, s, coloring)
    if not chk:
        raise WitnessError(f"script yields an invalid coloring: {chk.violation}")
    return g, coloring


def _pair_ops(bld: _Build, ops: list[Op], names, u: int, v: int, adjacent: bool, regime: str):
    count2 = {u: 0, v: 0}
    count3 = {u: 0, v: 0}
    for op in ops:
        x = _target(op.target, names)
        if x not in (u, v):
            raise WitnessError("pair regime operations must target u or v")
        size = op.sizes[0] if op.sizes else 1
        for _ in range(op.count):
            if op.name == "add3":
                bld.add3(x, size)
                count3[x] += 1
            elif op.name == "add2":
                bld.add2(x, size)
                count2[x] += 1
            else:
                raise WitnessError(f"{op.name} is not available in the pair regime")
    if regime == "1-2":
        if count2[u] + count2[v] > 1:
            raise WitnessError("only one 2-add is allowed in the pair regime")
        return
    for x in (u, v):
        if count2[x] > 1 or (count2[x] and count3[x]):
            raise WitnessError("a 2-add replaces the 3-adds on its vertex")
    if adjacent and count2[u] and count2[v]:
        raise WitnessError("with u and v adjacent only one of them may take a 2-add")


def _bipartite_build(bld: _Build, w: BipartitWitness, names, kinds, regime, k, kp):
    mg = w.base if isinstance(w.base, MultiGraph) else MultiGraph(w.base.n, tuple(w.base.sorted_edges()))
    side = bipartition(mg.underlying())
    if side is None:
        raise WitnessError("bipartite regime needs a bipartite base")
    a_side = set(w.side_a)
    for x, y in mg.edges:
        if (x in a_side) == (y in a_side):
            raise WitnessError(f"edge {x}{y} does not cross the A/B sides")
    copies: dict[tuple[int, int], int] = {}
    edge_refs = []
    for x, y in mg.edges:
        key = (min(x, y), max(x, y))
        edge_refs.append((key[0], key[1], copies.get(key, 0)))
        copies[key] = copies.get(key, 0) + 1
    if w.subdivided is not None and sorted(w.subdivided) != sorted(edge_refs):
        raise WitnessError("every edge of the base must be subdivided three times, once each")
    for x in range(mg.n):
        a = x in a_side
        names[str(x)] = bld.vertex(4 if a else 3)
        kinds[names[str(x)]] = "A" if a else "B"
    identified = {}
    for op in w.ops:
        if op.name == "identify":
            ref = _edge_ref(op.target)
            if ref not in edge_refs:
                raise WitnessError(f"identify: no edge {op.target}")
            identified[ref] = True
    _check_identify(identified, mg, a_side, regime, k, kp)
    deg = {x: 0 for x in range(mg.n)}
    for x, y in mg.edges:
        deg[x] += 1
        deg[y] += 1
    merged = set()
    for ref in edge_refs:
        x, y, c = ref
        a, b = (x, y) if x in a_side else (y, x)
        va, vb = names[str(a)], names[str(b)]
        tag = f"{x}-{y}-{c}"
        if ref in identified:
            m = bld.vertex(2)
            o = bld.vertex(1)
            bld.b.add_path([vb, m, o, va])
            names["c:" + tag] = m
            kinds[m] = "merged"
            merged.add(m)
        else:
            x1, cen, x3 = bld.vertex(1), bld.vertex(2), bld.vertex(1)
            bld.b.add_path([va, x1, cen, x3, vb])
            names["c:" + tag] = cen
            kinds[cen] = "central"
    g_now = lambda: bld.b.build()
    leaf_hosts = []
    two_adds: dict[int, int] = {}
    heavy: dict[int, list[str]] = {}
    for op in w.ops:
        if op.name == "identify":
            continue
        x = _target(op.target, names)
        kind = kinds.get(x)
        size = op.sizes[0] if op.sizes else 1
        if op.name == "leaf":
            if kind not in ("A", "B", "central", "merged"):
                raise WitnessError("leaves go on A/B vertices or central subdivided vertices")
            for _ in range(op.count):
                bld.b.add_edge(x, bld.vertex(1))
            if kind in ("central", "merged"):
                leaf_hosts.append(x)
            continue
        if kind not in ("A", "B"):
            raise WitnessError(f"{op.name} must target a vertex coming from A or B")
        if op.name == "add3":
            for _ in range(op.count):
                bld.add3(x, size)
        elif op.name == "add2":
            if regime == "1-3":
                raise WitnessError("2-adds are not available in the bipartite (1,3,k,k') regime")
            near = set(bld.b.build().adj[x])
            if near & merged:
                raise WitnessError("no 2-add on a vertex adjacent to an identified vertex")
            two_adds[x] = two_adds.get(x, 0) + op.count
            for _ in range(op.count):
                bld.add2(x, size)
        elif op.name == "add36":
            if regime != "1-3":
                raise WitnessError("3-6-adds belong to the (1,3,k,k') regime")
            if not ((kind == "A" and k <= 6) or kp <= 6):
                raise WitnessError(f"3-6-add not allowed on an {kind}-vertex when k={k}, k'={kp}")
            heavy.setdefault(x, []).extend(["add36"] * op.count)
            s2 = op.sizes[1] if len(op.sizes) > 1 else 1
            for _ in range(op.count):
                w1 = bld.add3(x, size)
                bld.add2(w1, s2, cl=bld.big_other(x))
        elif op.name == "add35":
            if k != 5 or kind != "A":
                raise WitnessError("3-5-adds need k=5 and an A-vertex")
            heavy.setdefault(x, []).extend(["add35"] * op.count)
            inner = op.sizes[1:] or (1,)
            for _ in range(op.count):
                w1 = bld.add3(x, size, cl=bld.big_other(x))
                if op.variant == "via2":
                    bld.add2(w1, inner[0])
                else:
                    for sz in inner:
                        bld.add3(w1, sz)
        elif op.name == "add25":
            if regime != "1-2" or k != 5 or kind != "A":
                raise WitnessError("2-5-adds need (1,2,5,k') and an A-vertex")
            dist = all_pairs_distances(bld.b.build())
            if any(0 <= dist(x, m) <= 2 for m in merged):
                raise WitnessError("no 2-5-add within distance 2 of an identified vertex")
            heavy.setdefault(x, []).extend(["add25"] * op.count)
            inner = op.sizes[2:] or (1,)
            for _ in range(op.count):
                w1 = bld.add2(x, size)
                w2 = bld.add2(w1, op.sizes[1] if len(op.sizes) > 1 else 0, cl=bld.big_other(x))
                for sz in inner:
                    bld.add3(w2, sz)
        else:
            raise WitnessError(f"unknown operation {op.name!r}")
    if regime == "1-3":
        for x, lst in heavy.items():
            if lst.count("add35") > 1 or (len(lst) > 1 and k != 5):
                raise WitnessError("only k=5 allows several 3-6-adds or a 3-5-add on one vertex")
            if "add35" in lst and "add36" in lst:
                raise WitnessError("a 3-5-add replaces the 3-6-adds on its vertex")
    else:
        for x, lst in heavy.items():
            if len(lst) > 1 or (two_adds.get(x) and lst):
                raise WitnessError("a 2-5-add or 3-5-add replaces the single 2-add of its vertex")
        if any(c > 1 for c in two_adds.values()):
            raise WitnessError("at most one 2-add per vertex")
        if leaf_hosts:
            dist = all_pairs_distances(g_now())
            for p, q in itertools.combinations(sorted(set(leaf_hosts)), 2):
                if dist(p, q) == 2:
                    raise WitnessError("leaves on two vertices at distance 2")


def _edge_ref(text: str) -> tuple[int, int, int]:
    parts = text.removeprefix("c:").split("-")
    if len(parts) == 2:
        parts.append("0")
    if len(parts) != 3:
        raise WitnessError(f"bad edge reference {text!r}; expected u-v-copy")
    x, y, c = map(int, parts)
    return (min(x, y), max(x, y), c)


def _check_identify(identified: dict, mg: MultiGraph, a_side, regime, k, kp):
    if not identified:
        return
    if regime != "1-2":
        raise WitnessError("identifications belong to the (1,2,k,k') regime")
    nbrs: dict[int, set] = {}
    for x, y in mg.edges:
        nbrs.setdefault(x, set()).add(y)
        nbrs.setdefault(y, set()).add(x)
    refs = list(identified)
    bside = lambda r: r[0] if r[0] not in a_side else r[1]
    if k <= 6 and kp == 7:
        for r in refs:
            if len(nbrs[bside(r)]) != 1:
                raise WitnessError("with k'=7 the B end of an identified edge must have one neighbor")
    elif k == 6 and kp == 6:
        ends = [x for r in refs for x in r[:2]]
        if len(ends) != len(set(ends)):
            raise WitnessError("with k=k'=6 identified edges must be independent")
    elif k == 5 and kp == 6:
        bs = [bside(r) for r in refs]
        if len(bs) != len(set(bs)):
            raise WitnessError("with k=5, k'=6 identified edges may not share a B end")
    else:
        raise WitnessError(f"identifications are not allowed for k={k}, k'={kp}")


def _vid(token) -> int:
    v = int(token)
    if v < 1:
        raise WitnessError(f"vertex ids are 1-based, got {v}")
    return v - 1


def parse_witness(text: str, base_dir: str | None = None) -> BipartitWitness:
    """Parse the line-oriented witness script format (see README)."""
    regime = None
    base = None
    cover: tuple[int, ...] = ()
    side_a: set[int] = set()
    subdivided = []
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "regime":
                regime = rest[0]
            elif head == "base":
                path = rest[0]
                if base_dir and not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                with open(path) as fh:
                    body = fh.read()
                base = read_multigraph(body) if body.lstrip().startswith("pm") or "\npm" in body \
                    else read_graph(body)
            elif head == "graph":
                base = read_graph(" ".join(rest).replace(";", "\n"))
            elif head == "cover":
                cover = tuple(_vid(x) for x in rest)
            elif head == "side-a":
                side_a |= {_vid(x) for x in rest}
            elif head == "subdivide3":
                x, y = _vid(rest[0]), _vid(rest[1])
                c = int(rest[2]) if len(rest) > 2 else 0
                subdivided.append((min(x, y), max(x, y), c))
            elif head in OPS:
                target = rest[0]
                if "-" in target:
                    x, y, c = _edge_ref(target)
                    target = f"{_vid(x)}-{_vid(y)}-{c}"
                    if head != "identify":
                        target = "c:" + target
                else:
                    target = str(_vid(target))
                count = 1
                sizes = []
                variant = ""
                for tok in rest[1:]:
                    if tok.startswith("x"):
                        count = int(tok[1:])
                    elif tok == "via2":
                        variant = tok
                    else:
                        sizes.append(int(tok))
                ops.append(Op(head, target, tuple(sizes), count, variant))
            else:
                raise WitnessError(f"unknown directive {head!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, (WitnessError, GraphFormatError)):
                raise WitnessError(f"line {lineno}: {exc}") from None
            raise WitnessError(f"line {lineno}: malformed {head!r} line") from None
    if regime is None or base is None:
        raise WitnessError("script needs both a regime and a base")
    if regime == "bipartite" and isinstance(base, Graph):
        base = MultiGraph(base.n, tuple(base.sorted_edges()))
    return BipartitWitness(regime, base, cover, frozenset(side_a),
                           tuple(subdivided) if subdivided else None, ops)
