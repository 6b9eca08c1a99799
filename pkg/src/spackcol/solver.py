"""Exact S-packing coloring engine.

Colorings are tuples ``c`` with ``c[v]`` in ``1..k``; class ``i`` must be an
``s_i``-packing, i.e. two members are at hop distance strictly above ``s_i``.

The search is a bitmask backtracker: every (radius, vertex) pair has a
precomputed ball, each class keeps the set of vertices it can no longer take,
and the next vertex is the one with the fewest remaining classes.
"""
from __future__ import annotations

import enum
import random
import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import UNREACHABLE, DistanceMatrix, Graph, all_pairs_distances

DEFAULT_BUDGET = 50_000_000
MAX_CLIQUES = 20_000
RESTART_BASE = 4_000

Coloring = tuple


class SList(tuple):
    """Nondecreasing tuple of positive packing radii."""

    def __new__(cls, values: Iterable[int]):
        vals = tuple(int(v) for v in values)
        if not vals:
            raise ValueError("SList must be nonempty")
        if any(v < 1 for v in vals):
            raise ValueError(f"SList entries must be positive: {vals}")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"SList must be nondecreasing: {vals}")
        return super().__new__(cls, vals)

    @classmethod
    def parse(cls, text: str) -> "SList":
        try:
            return cls(int(x) for x in text.replace(" ", "").split(",") if x)
        except ValueError as exc:
            raise ValueError(f"bad SList '{text}': {exc}") from None

    def count(self, value: int) -> int:  # N_value(S)
        return sum(1 for v in self if v == value)

    def __repr__(self):
        return "(" + ",".join(map(str, self)) + ")"


def as_slist(s) -> SList:
    return s if isinstance(s, SList) else SList(s)


def slist_leq(a, b) -> bool:
    """``a <= b`` in the packing order: entrywise ``a_i >= b_i`` (larger radii are harder)."""
    a, b = as_slist(a), as_slist(b)
    if len(a) != len(b):
        raise ValueError("slist_leq needs lists of equal length")
    return all(x >= y for x, y in zip(a, b))


class Status(enum.Enum):
    COLORABLE = "colorable"
    NOT_COLORABLE = "not-colorable"
    ABORTED = "aborted"


@dataclass(frozen=True)
class Verdict:
    status: Status
    coloring: Coloring | None = None
    nodes: int = 0
    note: str = ""

    @property
    def colorable(self) -> bool:
        return self.status is Status.COLORABLE

    @property
    def aborted(self) -> bool:
        return self.status is Status.ABORTED

    def __repr__(self):
        return f"Verdict({self.status.value}, nodes={self.nodes})"


@dataclass(frozen=True)
class Violation:
    u: int
    v: int
    cls: int


@dataclass(frozen=True)
class Check:
    ok: bool
    violation: Violation | None = None

    def __bool__(self):
        return self.ok


def verify_coloring(g: Graph, s, c: Sequence[int], dist: DistanceMatrix | None = None) -> Check:
    s = as_slist(s)
    if len(c) != g.n:
        raise ValueError(f"coloring covers {len(c)} vertices, graph has {g.n}")
    for v, cl in enumerate(c):
        if not 1 <= cl <= len(s):
            raise ValueError(f"class {cl} of vertex {v} outside 1..{len(s)}")
    dist = dist or all_pairs_distances(g)
    d = dist.d
    members: dict[int, list[int]] = {}
    for v, cl in enumerate(c):
        members.setdefault(cl, []).append(v)
    for cl in sorted(members):
        vs = members[cl]
        r = s[cl - 1]
        for a in range(len(vs)):
            row = d[vs[a]]
            for b in range(a + 1, len(vs)):
                dd = row[vs[b]]
                if dd != UNREACHABLE and dd <= r:
                    return Check(False, Violation(vs[a], vs[b], cl))
    return Check(True)


@dataclass
class ConstraintSet:
    """Extra requirements on a coloring.

    ``distinct``/``equal`` entries are ``(u, v)`` or ``(u, v, classes)``; the
    optional class collection additionally confines both endpoints to it.
    """

    fixed: dict[int, int] = field(default_factory=dict)
    forbidden: set[tuple[int, int]] = field(default_factory=set)
    distinct: list[tuple] = field(default_factory=list)
    equal: list[tuple] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.fixed or self.forbidden or self.distinct or self.equal)


_FOUND = object()


class _Aborted(Exception):
    pass


class _Contradiction(Exception):
    pass


def _row_mask(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _bits(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _priority_order(g: Graph) -> list[int]:
    """Descending degree, broken by breadth-first order from a max-degree root."""
    if g.n == 0:
        return []
    bfs_rank = {}
    degs = g.degrees
    for root in sorted(range(g.n), key=lambda v: (-degs[v], v)):
        if root in bfs_rank:
            continue
        bfs_rank[root] = len(bfs_rank)
        queue = [root]
        for u in queue:
            for w in sorted(g.adj[u], key=lambda x: (-degs[x], x)):
                if w not in bfs_rank:
                    bfs_rank[w] = len(bfs_rank)
                    queue.append(w)
    return sorted(range(g.n), key=lambda v: (-degs[v], bfs_rank[v]))


class _Search:
    """One search instance; vertices are renumbered so that low bits are high priority."""

    def __init__(self, g: Graph, s: SList, cs: ConstraintSet | None, dist: DistanceMatrix | None,
                 budget: int, order: Sequence[int] | None = None):
        self.g, self.s, self.k, self.n = g, s, len(s), g.n
        self.budget = budget
        self.nodes = 0
        self.rng = None
        dist = dist or all_pairs_distances(g)
        self.order = list(order) if order is not None else _priority_order(g)
        pos = [0] * g.n
        for i, v in enumerate(self.order):
            pos[v] = i
        self.pos = pos
        d = dist.d[np.ix_(self.order, self.order)]
        reach = d != UNREACHABLE
        self.balls: dict[int, list[int]] = {}
        for r in sorted(set(s)):
            within = reach & (d <= r)
            self.balls[r] = [_row_mask(within[i]) for i in range(self.n)]
        full = (1 << self.n) - 1
        self.full = full
        adj1 = reach & (d == 1)
        self.nbr = [_row_mask(adj1[i]) for i in range(self.n)]
        allowed = [full] * self.k
        self.partners_distinct: list[list[int]] = [[] for _ in range(self.n)]
        self.partners_equal: list[list[int]] = [[] for _ in range(self.n)]
        cs = cs or ConstraintSet()
        self._apply(cs, allowed)
        self.allowed = allowed
        # interchangeable classes: same radius, same admissible vertex set
        self.group_prev: list[list[int]] = []
        for c in range(self.k):
            self.group_prev.append([b for b in range(c)
                                    if s[b] == s[c] and allowed[b] == allowed[c]])
        self._init_cliques(reach & (d <= s[0]))

    def _init_cliques(self, close: np.ndarray) -> None:
        """Vertex sets pairwise within distance s_1: their classes are pairwise distinct."""
        import networkx as nx

        self.cliques: list[int] = []
        self.touch: dict[int, list[list[int]]] = {}
        if self.n < 3:
            return
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        rows, cols = np.nonzero(np.triu(close, 1))
        h.add_edges_from(zip(rows.tolist(), cols.tolist()))
        for q in nx.find_cliques(h):
            if len(q) >= 3:
                self.cliques.append(_bits(q))
                if len(self.cliques) > MAX_CLIQUES:
                    self.cliques = []
                    return
        if not self.cliques:
            return
        member_of: list[list[int]] = [[] for _ in range(self.n)]
        for idx, q in enumerate(self.cliques):
            m = q
            while m:
                low = m & -m
                member_of[low.bit_length() - 1].append(idx)
                m ^= low
        self.member_of = member_of
        for r, balls in self.balls.items():
            lists = []
            for v in range(self.n):
                ids = set()
                m = balls[v]
                while m:
                    low = m & -m
                    ids.update(member_of[low.bit_length() - 1])
                    m ^= low
                lists.append(sorted(ids))
            self.touch[r] = lists

    def _apply(self, cs: ConstraintSet, allowed: list[int]) -> None:
        k, n, pos = self.k, self.n, self.pos

        def check_vc(v, c):
            if not 0 <= v < n:
                raise ValueError(f"constraint on missing vertex {v}")
            if not 1 <= c <= k:
                raise ValueError(f"constraint on class {c} outside 1..{k}")

        for v, c in cs.fixed.items():
            check_vc(v, c)
            if (v, c) in cs.forbidden:
                raise _Contradiction(f"vertex {v} both fixed to and forbidden from class {c}")
            for b in range(k):
                if b != c - 1:
                    allowed[b] &= ~(1 << pos[v])
        for v, c in cs.forbidden:
            check_vc(v, c)
            allowed[c - 1] &= ~(1 << pos[v])
        for kind, pairs, table in (("distinct", cs.distinct, self.partners_distinct),
                                   ("equal", cs.equal, self.partners_equal)):
            for item in pairs:
                u, v = item[0], item[1]
                sub = item[2] if len(item) > 2 else None
                check_vc(u, 1)
                check_vc(v, 1)
                if u == v:
                    if kind == "distinct":
                        raise _Contradiction(f"vertex {u} required distinct from itself")
                    continue
                if sub is not None:
                    sub = set(sub)
                    for c in sub:
                        check_vc(u, c)
                    for b in range(k):
                        if b + 1 not in sub:
                            allowed[b] &= ~((1 << pos[u]) | (1 << pos[v]))
                fu, fv = cs.fixed.get(u), cs.fixed.get(v)
                if fu is not None and fv is not None:
                    if kind == "distinct" and fu == fv:
                        raise _Contradiction(f"vertices {u},{v} fixed equal but required distinct")
                    if kind == "equal" and fu != fv:
                        raise _Contradiction(f"vertices {u},{v} fixed different but required equal")
                table[pos[u]].append(pos[v])
                table[pos[v]].append(pos[u])
        for v in range(n):
            if not any(allowed[b] >> pos[v] & 1 for b in range(k)):
                raise _Contradiction(f"vertex {v} has no admissible class")

    def run(self, on_solution, static: bool = False) -> bool:
        """Depth-first search calling ``on_solution(colors)``; stop when it returns True."""
        limit = max(sys.getrecursionlimit(), 3 * self.n + 1000)
        sys.setrecursionlimit(limit)
        self.color = [0] * self.n
        self.members = [0] * self.k
        self.on_solution = on_solution
        self.static = static
        self.pd_mask = [_bits(ws) for ws in self.partners_distinct]
        self.pe_mask = [_bits(ws) for ws in self.partners_equal]
        blocked = [~a & self.full for a in self.allowed]
        agenda = range(len(self.cliques))
        return self._step(blocked, self.full, 0, agenda, 0) is _FOUND

    def _reasons(self, y: int, blocked: list[int], assigned: int) -> int:
        """Assigned vertices responsible for the classes ``y`` can no longer take."""
        bit = 1 << y
        r = (self.pd_mask[y] | self.pe_mask[y]) & assigned
        members, balls, s = self.members, self.balls, self.s
        for c in range(self.k):
            if blocked[c] & bit:
                r |= members[c] & balls[s[c]][y]
        return r

    def _reasons_all(self, vs: int, blocked: list[int], assigned: int) -> int:
        r = 0
        while vs:
            low = vs & -vs
            r |= self._reasons(low.bit_length() - 1, blocked, assigned)
            vs ^= low
        return r

    def _propagate(self, blocked: list[int], free: int, agenda, taint: int):
        """Counting inference on the cliques: free vertices of a clique need
        distinct unused classes; a class with a single candidate is forced
        when every class is needed. Mutates ``blocked``; returns
        ``(conflict or None, taint)`` where ``taint`` explains derived blocks."""
        k, members, cliques = self.k, self.members, self.cliques
        assigned = self.full & ~free
        queue = list(agenda)
        queued = set(queue)
        while queue:
            idx = queue.pop()
            queued.discard(idx)
            q = cliques[idx]
            fq = q & free
            if not fq:
                continue
            need = fq.bit_count()
            avail = []
            for c in range(k):
                if members[c] & q:
                    continue
                h = fq & ~blocked[c]
                if h:
                    avail.append((c, h))
            if need > len(avail):
                return taint | (assigned & q) | self._reasons_all(fq, blocked, assigned), taint
            if need < len(avail):
                continue
            for c, h in avail:
                if h & (h - 1):
                    continue
                if all(blocked[b] & h for b in range(k) if b != c):
                    continue
                taint |= (assigned & q) | self._reasons_all(fq, blocked, assigned)
                for b in range(k):
                    if b != c:
                        blocked[b] |= h
                for j in self.member_of[h.bit_length() - 1]:
                    if j not in queued:
                        queued.add(j)
                        queue.append(j)
        return None, taint

    def _step(self, blocked: list[int], free: int, frontier: int, agenda, taint: int):
        """Returns ``_FOUND`` or a conflict set: assigned vertices whose values
        rule out every extension (conflict-directed backjumping)."""
        self.nodes += 1
        if self.nodes > self.budget:
            raise _Aborted()
        full = self.full
        if not free:
            return _FOUND if self.on_solution(self.color) else full
        if agenda:
            bad, taint = self._propagate(blocked, free, agenda, taint)
            if bad is not None:
                return bad
        k = self.k
        ge1 = ge2 = ge3 = 0
        for c in range(k):
            a = free & ~blocked[c]
            ge3 |= ge2 & a
            ge2 |= ge1 & a
            ge1 |= a
        dead = free & ~ge1
        if dead:
            y = (dead & -dead).bit_length() - 1
            return self._reasons(y, blocked, full & ~free) | taint
        if self.static:
            pick = free & -free
        else:
            single = ge1 & ~ge2
            two = ge2 & ~ge3
            cand = single or two or free
            # grow the assigned region: prefer candidates next to it
            near = cand & frontier
            if near:
                cand = near
            if self.rng is not None:
                r = self.rng.randrange(self.n)
                hi = cand >> r
                pick = (hi & -hi) << r if hi else cand & -cand
            else:
                pick = cand & -cand
        v = pick.bit_length() - 1
        s, members, balls = self.s, self.members, self.balls
        rest = free & ~pick
        nfront = (frontier | self.nbr[v]) & rest
        conflict = 0
        symmetric_skip = False
        for c in range(k):
            if blocked[c] & pick:
                continue
            if members[c] == 0 and any(members[b] == 0 for b in self.group_prev[c]):
                symmetric_skip = True
                continue
            nb = list(blocked)
            nb[c] |= balls[s[c]][v] | self.pd_mask[v]
            pe = self.pe_mask[v]
            if pe:
                for b in range(k):
                    if b != c:
                        nb[b] |= pe
            sub = self.touch[s[c]][v] if self.cliques else ()
            if self.cliques and (pe or self.pd_mask[v]):
                sub = set(sub)
                m = pe | self.pd_mask[v]
                while m:
                    low = m & -m
                    sub.update(self.member_of[low.bit_length() - 1])
                    m ^= low
            self.color[v] = c + 1
            members[c] |= pick
            res = self._step(nb, rest, nfront, sub, taint)
            members[c] &= ~pick
            self.color[v] = 0
            if res is _FOUND:
                return res
            if not res & pick:
                return res
            conflict |= res
        assigned = full & ~free
        if symmetric_skip:
            # the skipped classes were pruned as images of tried ones; that
            # argument needs the whole current assignment
            conflict |= assigned
        conflict |= self._reasons(v, blocked, assigned) | taint
        return conflict & ~pick

    def to_original(self, colors: Sequence[int]) -> Coloring:
        out = [0] * self.n
        for i, v in enumerate(self.order):
            out[v] = colors[i]
        return tuple(out)


def solve_constrained(g: Graph, s, cs: ConstraintSet | None = None, budget: int = DEFAULT_BUDGET,
                      dist: DistanceMatrix | None = None) -> Verdict:
    """Exact search under ``cs``.

    Runs are restarted with randomized tie-breaking and doubling node limits;
    every run is complete, so a run that ends without a solution proves
    uncolorability, and the sum over runs is charged against ``budget``.
    """
    s = as_slist(s)
    dist = dist or all_pairs_distances(g)
    try:
        search = _Search(g, s, cs, dist, budget)
    except _Contradiction as exc:
        return Verdict(Status.NOT_COLORABLE, note=f"syntactic contradiction: {exc}")
    found: list[Coloring] = []

    def keep(colors):
        found.append(search.to_original(colors))
        return True

    total, limit, attempt = 0, RESTART_BASE, 0
    while True:
        search.budget = min(limit, budget - total)
        search.nodes = 0
        search.rng = random.Random(attempt) if attempt else None
        try:
            search.run(keep)
            total += search.nodes
            break
        except _Aborted:
            total += search.budget
            if total >= budget:
                return Verdict(Status.ABORTED, nodes=total, note="budget exhausted")
        attempt += 1
        limit *= 2
    if not found:
        return Verdict(Status.NOT_COLORABLE, nodes=total)
    coloring = found[0]
    check = verify_coloring(g, s, coloring, dist)
    if not check:
        raise AssertionError(f"solver produced an invalid coloring: {check.violation}")
    return Verdict(Status.COLORABLE, coloring, total)


def solve(g: Graph, s, budget: int = DEFAULT_BUDGET, dist: DistanceMatrix | None = None) -> Verdict:
    return solve_constrained(g, s, None, budget, dist)


@dataclass(frozen=True)
class Enumeration:
    colorings: list
    truncated: bool


def canonical_form(c: Sequence[int], s) -> Coloring:
    """Relabel classes inside each equal-radius group by smallest member id."""
    s = as_slist(s)
    groups: dict[int, list[int]] = {}
    for i, r in enumerate(s, 1):
        groups.setdefault(r, []).append(i)
    rename = {}
    for cls_list in groups.values():
        first = {cl: min((v for v, x in enumerate(c) if x == cl), default=None) for cl in cls_list}
        used = sorted((f, cl) for cl, f in first.items() if f is not None)
        for slot, (_, cl) in zip(cls_list, used):
            rename[cl] = slot
    return tuple(rename[x] for x in c)


def enumerate_colorings(g: Graph, s, cap: int = 10_000, budget: int = DEFAULT_BUDGET) -> Enumeration:
    """All colorings up to permutation of equal-radius classes, in canonical form.

    Vertices are branched on in id order and a class group is opened lowest
    index first, so each output lists classes of a group by smallest member.
    """
    s = as_slist(s)
    search = _Search(g, s, None, None, budget, order=list(range(g.n)))
    out: list[Coloring] = []
    state = {"truncated": False}

    def keep(colors):
        if len(out) >= cap:
            state["truncated"] = True
            return True
        out.append(tuple(colors))
        return False

    try:
        search.run(keep, static=True)
    except _Aborted:
        state["truncated"] = True
    return Enumeration(out, state["truncated"])


class SolverAborted(RuntimeError):
    pass


def packing_chromatic_number(g: Graph, max_k: int, budget: int = DEFAULT_BUDGET) -> int | None:
    """Least k <= max_k with g (1,2,...,k)-colorable; None means '> max_k'."""
    if max_k < 1:
        raise ValueError("max_k must be at least 1")
    dist = all_pairs_distances(g)
    for k in range(1, max_k + 1):
        v = solve(g, range(1, k + 1), budget, dist)
        if v.aborted:
            raise SolverAborted(f"budget exhausted at k={k}")
        if v.colorable:
            return k
    return None


def read_coloring(text: str) -> tuple[SList | None, Coloring]:
    s = None
    pairs: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] == "s":
            s = SList(int(x) for x in tok[1:])
        elif tok[0] == "c" and len(tok) == 3:
            v, cl = int(tok[1]), int(tok[2])
            if v < 1 or v in pairs:
                raise ValueError(f"line {lineno}: bad or repeated vertex {v}")
            pairs[v] = cl
        else:
            raise ValueError(f"line {lineno}: unknown record")
    if sorted(pairs) != list(range(1, len(pairs) + 1)):
        raise ValueError("coloring must list vertices 1..n")
    return s, tuple(pairs[v] for v in range(1, len(pairs) + 1))


def write_coloring(c: Sequence[int], s=None) -> str:
    lines = []
    if s is not None:
        lines.append("s " + " ".join(map(str, s)))
    lines += [f"c {v + 1} {cl}" for v, cl in enumerate(c)]
    return "\n".join(lines) + "\n"
