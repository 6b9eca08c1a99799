"""Graph substrate: immutable simple graphs, hop distances, family builders,
vertex surgery (gluing, subdivision), structural probes, text I/O and
subtree containment for trees.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

UNREACHABLE = -1


class GraphFormatError(ValueError):
    """Raised on malformed graph/multigraph text input."""


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Labels are advisory annotations and take no part in equality.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    labels: Mapping[int, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        normed = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            normed.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(normed))
        for v in self.labels:
            if not 0 <= v < self.n:
                raise ValueError(f"label on missing vertex {v}")
        object.__setattr__(self, "labels", dict(self.labels))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   labels: Mapping[int, str] | None = None, *, strict: bool = True) -> "Graph":
        edges = list(edges)
        normed = {_norm(u, v) for u, v in edges}
        if strict and len(normed) != len(edges):
            raise ValueError("duplicate edge")
        return cls(n, frozenset(normed), dict(labels or {}))

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges],
                                {perm[v]: t for v, t in self.labels.items()})

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph and the list mapping new ids to old ids."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        labels = {index[v]: t for v, t in self.labels.items() if v in index}
        return Graph.from_edges(len(keep), edges, labels), keep

    def with_labels(self, labels: Mapping[int, str]) -> "Graph":
        merged = dict(self.labels)
        merged.update(labels)
        return Graph(self.n, self.edges, merged)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g) -> "Graph":
        nodes = sorted(g.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), [(index[u], index[v]) for u, v in g.edges()])

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class MultiGraph:
    """Undirected multigraph; parallel edges allowed, loops forbidden."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        normed = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} out of range for n={self.n}")
            normed.append(_norm(u, v))
        object.__setattr__(self, "edges", tuple(normed))

    @property
    def m(self) -> int:
        return len(self.edges)

    def underlying(self) -> Graph:
        return Graph.from_edges(self.n, set(self.edges), strict=False)


class DistanceMatrix:
    """All-pairs hop distances; ``UNREACHABLE`` marks pairs in different components."""

    def __init__(self, d: np.ndarray):
        self.d = d
        self.n = d.shape[0]

    def __call__(self, u: int, v: int) -> int:
        return int(self.d[u, v])

    def reachable(self, u: int, v: int) -> bool:
        return self.d[u, v] != UNREACHABLE

    def within(self, u: int, r: int) -> np.ndarray:
        """Vertices at distance at most ``r`` from ``u`` (including ``u``)."""
        row = self.d[u]
        return np.flatnonzero((row != UNREACHABLE) & (row <= r))

    def eccentricity(self, u: int) -> int:
        return int(self.d[u].max())

    def __eq__(self, other):
        return isinstance(other, DistanceMatrix) and np.array_equal(self.d, other.d)


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """Breadth-first search from every vertex."""
    d = np.full((g.n, g.n), UNREACHABLE, dtype=np.int64)
    adj = g.adj
    for s in range(g.n):
        row = d[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = row[u] + 1
            for w in adj[u]:
                if row[w] == UNREACHABLE:
                    row[w] = du
                    queue.append(w)
    return DistanceMatrix(d)


# --- family builders -------------------------------------------------------

def build_path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs at least one vertex")
    labels = {0: "end0", n - 1: "end1"} if n > 1 else {0: "end0"}
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], labels)


def build_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def build_complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def build_star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def build_spider_y(n: int) -> Graph:
    """Y_n: three legs of length ``n`` sharing the center vertex 0.

    Leg ``a``/``b``/``c`` vertex at depth ``t`` has id ``1 + leg*n + (t-1)``.
    """
    if n < 1:
        raise ValueError("Y_n needs n >= 1")
    edges = []
    labels = {0: "a0"}
    for leg, name in enumerate("abc"):
        prev = 0
        for t in range(1, n + 1):
            v = 1 + leg * n + (t - 1)
            edges.append((prev, v))
            labels[v] = f"{name}{t}"
            prev = v
    return Graph.from_edges(3 * n + 1, edges, labels)


class GraphBuilder:
    """Mutable accumulator used to assemble gadgets and reductions.

    Vertices are created on demand; ``add_copy`` pastes a graph, identifying a
    subset of its vertices with existing ones.
    """

    def __init__(self, n: int = 0):
        self.n = n
        self.edges: set[tuple[int, int]] = set()
        self.labels: dict[int, str] = {}
        self.tags: dict[int, str] = {}

    def add_vertex(self, tag: str | None = None, label: str | None = None) -> int:
        v = self.n
        self.n += 1
        if tag is not None:
            self.tags[v] = tag
        if label is not None:
            self.labels[v] = label
        return v

    def add_vertices(self, k: int, tag: str | None = None) -> list[int]:
        return [self.add_vertex(tag) for _ in range(k)]

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        self.edges.add(_norm(u, v))

    def add_path(self, vertices: Sequence[int]) -> None:
        for u, v in zip(vertices, vertices[1:]):
            self.add_edge(u, v)

    def add_copy(self, g: Graph, attach: Mapping[int, int] | None = None,
                 tag: str | None = None) -> list[int]:
        """Paste ``g``; ``attach`` maps g-vertices onto existing vertices.

        Returns the list mapping each g-vertex to its id in the builder.
        """
        attach = dict(attach or {})
        if len(set(attach.values())) != len(attach):
            raise ValueError("two gadget vertices identified with one host vertex")
        mapping = []
        for v in range(g.n):
            if v in attach:
                mapping.append(attach[v])
            else:
                mapping.append(self.add_vertex(tag))
        for u, v in g.edges:
            self.add_edge(mapping[u], mapping[v])
        return mapping

    def remove_vertex(self, v: int) -> None:
        """Delete ``v`` and compact ids (the last id shifts down by one)."""
        self.edges = {e for e in self.edges if v not in e}
        shift = lambda x: x - 1 if x > v else x
        self.edges = {(shift(a), shift(b)) for a, b in self.edges}
        self.labels = {shift(k): t for k, t in self.labels.items() if k != v}
        self.tags = {shift(k): t for k, t in self.tags.items() if k != v}
        self.n -= 1

    def build(self) -> Graph:
        return Graph(self.n, frozenset(self.edges), dict(self.labels))


def glue(a: Graph, b: Graph, pairs: Sequence[tuple[int, int]], prefix: str = "b.",
         return_map: bool = False):
    """Disjoint union of ``a`` and ``b`` with each ``(x_a, y_b)`` pair identified.

    ``b``'s unpaired vertices are appended after ``a``'s in id order.
    """
    a_side = [p for p, _ in pairs]
    b_side = [q for _, q in pairs]
    if len(set(a_side)) != len(a_side):
        raise ValueError("identification would merge two distinct vertices of the first graph")
    if len(set(b_side)) != len(b_side):
        raise ValueError("a vertex of the second graph appears in two pairs")
    for p, q in pairs:
        if not (0 <= p < a.n and 0 <= q < b.n):
            raise ValueError(f"pair {(p, q)} out of range")
    bld = GraphBuilder(a.n)
    bld.edges = set(a.edges)
    bld.labels = dict(a.labels)
    # edges of b between two identified vertices are merged, never looped
    mapping = bld.add_copy(b, {q: p for p, q in pairs})
    for v, t in b.labels.items():
        bld.labels.setdefault(mapping[v], prefix + t)
    g = bld.build()
    return (g, mapping) if return_map else g


def subdivide_edge(g: Graph | MultiGraph, e: tuple[int, int], times: int = 1,
                   instance: int = 0) -> Graph | MultiGraph:
    """Replace edge ``e`` by a path with ``times`` new internal vertices.

    For a multigraph ``instance`` picks which parallel copy is replaced.
    With ``times == 3`` the middle new vertex is labeled ``central``.
    """
    if times < 1:
        raise ValueError("times must be positive")
    u, v = _norm(*e)
    new = list(range(g.n, g.n + times))
    chain = [u, *new, v]
    extra = list(zip(chain, chain[1:]))
    if isinstance(g, MultiGraph):
        idx = [i for i, f in enumerate(g.edges) if f == (u, v)]
        if len(idx) <= instance:
            raise ValueError(f"edge {e} (copy {instance}) absent")
        edges = list(g.edges)
        del edges[idx[instance]]
        return MultiGraph(g.n + times, tuple(edges + extra))
    if (u, v) not in g.edges:
        raise ValueError(f"edge {e} absent")
    labels = dict(g.labels)
    if times == 3:
        labels[new[1]] = "central"
    return Graph(g.n + times, frozenset((g.edges - {(u, v)}) | set(extra)), labels)


# --- probes ------------------------------------------------------------------

def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def bipartition(g: Graph) -> list[int] | None:
    """Side (0/1) of every vertex, lowest id of each component on side 0; None if odd cycle."""
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] != -1:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if side[w] == -1:
                    side[w] = 1 - side[u]
                    queue.append(w)
                elif side[w] == side[u]:
                    return None
    return side


def is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.m == g.n - 1 and is_connected(g)


def small_vertex_cover(g: Graph, max_size: int = 3) -> tuple[int, ...] | None:
    """A vertex cover of size at most ``max_size`` (smallest found first), or None."""
    edges = list(g.edges)
    for size in range(0, max_size + 1):
        for cover in itertools.combinations(range(g.n), size):
            cs = set(cover)
            if all(u in cs or v in cs for u, v in edges):
                return cover
    return None


@dataclass(frozen=True)
class Probes:
    is_connected: bool
    is_bipartite: bool
    is_subcubic: bool
    is_cubic: bool
    vertex_cover_leq_3: tuple[int, ...] | None


def structure_probes(g: Graph) -> Probes:
    degs = g.degrees
    return Probes(
        is_connected=is_connected(g),
        is_bipartite=bipartition(g) is not None,
        is_subcubic=all(d <= 3 for d in degs),
        is_cubic=g.n > 0 and all(d == 3 for d in degs),
        vertex_cover_leq_3=small_vertex_cover(g, 3),
    )


# --- text I/O ----------------------------------------------------------------

def _graph_lines(stream: TextIO | str):
    text = stream if isinstance(stream, str) else stream.read()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split(None, 2)


def _parse(stream, multi: bool):
    header = None
    edges: list[tuple[int, int]] = []
    labels: dict[int, str] = {}
    for lineno, tok in _graph_lines(stream):
        kind = tok[0]
        if kind in ("p", "pm"):
            if header is not None:
                raise GraphFormatError(f"line {lineno}: second header")
            if (kind == "pm") != multi:
                raise GraphFormatError(f"line {lineno}: header '{kind}' not valid here")
            try:
                n, m = (int(x) for x in " ".join(tok[1:]).split())
            except ValueError:
                raise GraphFormatError(f"line {lineno}: malformed header") from None
            if n < 0 or m < 0:
                raise GraphFormatError(f"line {lineno}: malformed header")
            header = (n, m)
            continue
        if header is None:
            raise GraphFormatError(f"line {lineno}: data before header")
        n = header[0]
        if kind == "e":
            try:
                u, v = (int(x) for x in " ".join(tok[1:]).split())
            except ValueError:
                raise GraphFormatError(f"line {lineno}: malformed edge") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"line {lineno}: vertex out of range 1..{n}")
            if u == v:
                raise GraphFormatError(f"line {lineno}: self-loop")
            edges.append((u - 1, v - 1))
        elif kind == "l":
            if len(tok) < 3:
                raise GraphFormatError(f"line {lineno}: malformed label")
            try:
                u = int(tok[1])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: malformed label") from None
            if not 1 <= u <= n:
                raise GraphFormatError(f"line {lineno}: vertex out of range 1..{n}")
            labels[u - 1] = tok[2]
        else:
            raise GraphFormatError(f"line {lineno}: unknown record '{kind}'")
    if header is None:
        raise GraphFormatError("missing header")
    if len(edges) != header[1]:
        raise GraphFormatError(f"header announces {header[1]} edges, found {len(edges)}")
    return header[0], edges, labels


def read_graph(stream: TextIO | str) -> Graph:
    n, edges, labels = _parse(stream, multi=False)
    normed = [_norm(u, v) for u, v in edges]
    if len(set(normed)) != len(normed):
        raise GraphFormatError("duplicate edge")
    return Graph.from_edges(n, normed, labels)


def read_multigraph(stream: TextIO | str) -> MultiGraph:
    n, edges, _ = _parse(stream, multi=True)
    return MultiGraph(n, tuple(edges))


def write_graph(g: Graph | MultiGraph, stream: TextIO | None = None) -> str:
    multi = isinstance(g, MultiGraph)
    edges = sorted(g.edges)
    lines = [f"{'pm' if multi else 'p'} {g.n} {len(edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in edges]
    if not multi:
        lines += [f"l {v + 1} {t}" for v, t in sorted(g.labels.items())]
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    return text


# --- subtree containment -----------------------------------------------------

def _max_matching(left: Sequence[int], right: Sequence[int], ok) -> dict[int, int] | None:
    """Perfect matching of ``left`` into ``right`` under predicate ``ok`` (augmenting paths)."""
    match_r: dict[int, int] = {}

    def augment(x, seen):
        for y in right:
            if y in seen or not ok(x, y):
                continue
            seen.add(y)
            if y not in match_r or augment(match_r[y], seen):
                match_r[y] = x
                return True
        return False

    for x in left:
        if not augment(x, set()):
            return None
    return {x: y for y, x in match_r.items()}


def contains_subtree(host: Graph, pattern: Graph) -> dict[int, int] | None:
    """Embedding (pattern vertex -> host vertex) of tree ``pattern`` into tree ``host``.

    Exact: the host is rooted once; every pattern vertex is tried as the image
    of the host-topmost vertex, and children are matched by bipartite matching.
    Returns None when no embedding exists.
    """
    if not is_tree(host) or not is_tree(pattern):
        raise ValueError("contains_subtree requires two trees")
    if pattern.n > host.n:
        return None
    parent = [-1] * host.n
    order = [0]
    parent[0] = 0
    for u in order:
        for w in host.adj[u]:
            if parent[w] == -1:
                parent[w] = u
                order.append(w)
    parent[0] = -1
    hchildren = [[w for w in host.adj[u] if w != parent[u]] for u in range(host.n)]
    memo: dict[tuple[int, int, int], dict[int, int] | None] = {}

    def fits(p: int, p_parent: int, h: int):
        key = (p, p_parent, h)
        if key in memo:
            return memo[key]
        pc = [c for c in pattern.adj[p] if c != p_parent]
        result = None
        if len(pc) <= len(hchildren[h]):
            match = _max_matching(pc, hchildren[h], lambda x, y: fits(x, p, y) is not None)
            if match is not None:
                result = {p: h}
                for x, y in match.items():
                    result.update(fits(x, p, y))
        memo[key] = result
        return result

    for root in range(pattern.n):
        for h in range(host.n):
            emb = fits(root, -1, h)
            if emb is not None:
                return emb
    return None
