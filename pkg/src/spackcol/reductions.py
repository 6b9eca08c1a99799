"""Executable reductions into S-COL and brute-force oracles for the source problems."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .gadgets import (ANTITRANSMITTER, CLAUSE, TRANSMITTER, Gadget, build_G_d,
                      build_J_iS, build_N_k, verify_gadget)
from .graph import Graph, GraphBuilder, MultiGraph, is_connected, subdivide_edge
from .solver import SList, as_slist


@dataclass(frozen=True)
class Nae3SatInstance:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(x) for x in c) for c in self.clauses)
        for c in clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} must have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    def variables(self) -> list[int]:
        return sorted({abs(l) for c in self.clauses for l in c})


def nae_brute_force(inst: Nae3SatInstance) -> dict[int, bool] | None:
    """A not-all-equal satisfying assignment, or None."""
    if inst.num_vars > 30:
        raise ValueError("brute force limited to 30 variables")
    for bits in itertools.product((False, True), repeat=inst.num_vars):
        val = lambda lit: bits[abs(lit) - 1] ^ (lit < 0)
        if all(len({val(l) for l in c}) == 2 for c in inst.clauses):
            return {v + 1: bits[v] for v in range(inst.num_vars)}
    return None


def incidence_connected(inst: Nae3SatInstance) -> bool:
    """Whether clauses and variables form one connected incidence structure."""
    if not inst.clauses:
        return True
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, c in enumerate(inst.clauses):
        for lit in c:
            parent[find(("c", idx))] = find(("v", abs(lit)))
    return len({find(x) for x in list(parent)}) == 1


def split_components(inst: Nae3SatInstance) -> list[Nae3SatInstance]:
    """Connected pieces of an instance, each with its variables renumbered from 1."""
    groups: list[tuple[set, list]] = []
    for c in inst.clauses:
        vs = {abs(l) for l in c}
        hit = [g for g in groups if g[0] & vs]
        merged = (vs.union(*(g[0] for g in hit)), [x for g in hit for x in g[1]] + [c])
        groups = [g for g in groups if g not in hit] + [merged]
    out = []
    for vs, clauses in groups:
        ren = {v: i for i, v in enumerate(sorted(vs), 1)}
        out.append(Nae3SatInstance(len(vs), tuple(
            tuple(ren[abs(l)] * (1 if l > 0 else -1) for l in c) for c in clauses)))
    return out


def canonical_instance(inst: Nae3SatInstance) -> tuple:
    """Key invariant under variable renaming, sign flips and clause/literal order."""
    vars_ = inst.variables()
    best = None
    for perm in itertools.permutations(range(1, len(vars_) + 1)):
        rename = dict(zip(vars_, perm))
        for flips in itertools.product((1, -1), repeat=len(vars_)):
            sign = dict(zip(vars_, flips))
            key = tuple(sorted(tuple(sorted(rename[abs(l)] * sign[abs(l)] * (1 if l > 0 else -1)
                                            for l in c)) for c in inst.clauses))
            if best is None or key < best:
                best = key
    return best


def enumerate_nae_instances(max_clauses: int = 2, max_vars: int = 3,
                            connected_only: bool = True) -> list[Nae3SatInstance]:
    """Instances up to renaming and sign flips.

    By default disconnected ones are skipped: each is a disjoint union of
    smaller instances that are already listed (see ``split_components``).
    """
    lits = [l for v in range(1, max_vars + 1) for l in (v, -v)]
    clauses = list(itertools.combinations_with_replacement(lits, 3))
    seen, out = set(), []
    for count in range(1, max_clauses + 1):
        for combo in itertools.combinations_with_replacement(clauses, count):
            inst = Nae3SatInstance(max_vars, combo)
            key = canonical_instance(inst)
            if key not in seen and (not connected_only or incidence_connected(inst)):
                seen.add(key)
                nv = len(inst.variables())
                out.append(Nae3SatInstance(nv, key))
    return out


def read_cnf(text: str) -> Nae3SatInstance:
    """DIMACS ``p cnf`` input restricted to 3-literal clauses."""
    header, clauses, pending = None, [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            tok = line.split()
            if len(tok) != 4 or tok[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed header")
            header = (int(tok[2]), int(tok[3]))
            continue
        if header is None:
            raise ValueError(f"line {lineno}: clause before header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if len(pending) != 3:
                    raise ValueError(f"line {lineno}: clause has {len(pending)} literals, need 3")
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if header is None:
        raise ValueError("missing header")
    if pending:
        raise ValueError("last clause lacks terminating 0")
    if len(clauses) != header[1]:
        raise ValueError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Nae3SatInstance(header[0], tuple(clauses))


def write_cnf(inst: Nae3SatInstance) -> str:
    lines = [f"p cnf {inst.num_vars} {len(inst.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in inst.clauses]
    return "\n".join(lines) + "\n"


@dataclass
class ReductionOutput:
    graph: Graph
    provenance: dict[int, str]
    target_s: SList
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if sorted(self.provenance) != list(range(self.graph.n)):
            raise AssertionError("provenance must cover every vertex exactly once")


def write_provenance(out: ReductionOutput) -> str:
    return "".join(f"v {v + 1} {out.provenance[v]}\n" for v in range(out.graph.n))


class _Assembly:
    """Builder that tags every vertex with its origin."""

    def __init__(self):
        self.b = GraphBuilder(0)
        self.copies = 0

    def vertex(self, tag: str) -> int:
        return self.b.add_vertex(tag)

    def paste(self, gadget: Gadget, attach: dict[int, int], what: str) -> list[int]:
        self.copies += 1
        inner = {gadget.connectors[i]: host for i, host in attach.items()}
        return self.b.add_copy(gadget.graph, inner, tag=f"gadget:{what}#{self.copies}")

    def finish(self, s, info=None) -> ReductionOutput:
        g = self.b.build()
        prov = {v: self.b.tags.get(v, "plumbing") for v in range(g.n)}
        return ReductionOutput(g, prov, as_slist(s), info or {})


_VERIFIED: dict[tuple, bool] = {}


def _gadget_usable(g: Gadget, budget: int) -> bool:
    key = (g.name, tuple(g.s), tuple(sorted(g.graph.edges)), g.connectors)
    if key not in _VERIFIED:
        rep = verify_gadget(g, budget)
        _VERIFIED[key] = rep.universal_ok and bool(rep.colorable_configs_ok) and not rep.inconclusive
    return _VERIFIED[key]


def reduce_nae_to_scol(inst: Nae3SatInstance, transmitter: Gadget, antitransmitter: Gadget,
                       clause_sim: Gadget, check: bool = True,
                       budget: int = 5_000_000) -> ReductionOutput:
    """Not-all-equal 3SAT into S-COL through transmitter/antitransmitter/clause-simulator gadgets.

    Each variable gets one transmitter ring per polarity with one ring
    vertex per occurrence plus a hub; the hubs are joined by an
    antitransmitter, and each occurrence is tied to its clause simulator
    corner by one more transmitter. A ring with one vertex is that vertex
    alone; with two vertices it is two parallel transmitters.
    """
    if not inst.clauses or not incidence_connected(inst):
        raise ValueError("instance must be non-empty with connected incidence; reduce components separately")
    roles = [(transmitter, TRANSMITTER), (antitransmitter, ANTITRANSMITTER), (clause_sim, CLAUSE)]
    for gad, kind in roles:
        if gad.role is None or gad.role.kind != kind:
            raise ValueError(f"{gad.name} is not a {kind}")
        if tuple(gad.s) != tuple(transmitter.s):
            raise ValueError("gadgets must share one SList")
        if (gad.role.i, gad.role.j) != (transmitter.role.i, transmitter.role.j):
            raise ValueError("gadgets must act on the same pair of classes")
        if any(gad.graph.degree(c) > 2 for c in gad.connectors):
            raise ValueError(f"{gad.name} has a connector of degree above 2")
        if check and not _gadget_usable(gad, budget):
            raise ValueError(f"{gad.name} fails verification of its role")
    asm = _Assembly()
    corners = []
    for idx, _ in enumerate(inst.clauses):
        hosts = {i: asm.vertex(f"clause:{idx}:corner{i + 1}") for i in range(3)}
        asm.paste(clause_sim, hosts, f"clause{idx}")
        corners.append([hosts[i] for i in range(3)])
    occurrences: dict[int, list[int]] = {}
    for idx, c in enumerate(inst.clauses):
        for pos, lit in enumerate(c):
            occurrences.setdefault(lit, []).append(corners[idx][pos])
    hubs = {}
    for var in inst.variables():
        for sign, name in ((1, "pos"), (-1, "neg")):
            occ = occurrences.get(sign * var, [])
            ring = [asm.vertex(f"var:{var}:{name}:hub")]
            ring += [asm.vertex(f"var:{var}:{name}:ring{t + 1}") for t in range(len(occ))]
            if len(ring) == 2:
                for _ in range(2):
                    asm.paste(transmitter, {0: ring[0], 1: ring[1]}, f"ring{var}{name}")
            elif len(ring) >= 3:
                for a, b in zip(ring, ring[1:] + ring[:1]):
                    asm.paste(transmitter, {0: a, 1: b}, f"ring{var}{name}")
            for r, corner in zip(ring[1:], occ):
                asm.paste(transmitter, {0: r, 1: corner}, f"link{var}{name}")
            hubs[(var, sign)] = ring[0]
        asm.paste(antitransmitter, {0: hubs[(var, 1)], 1: hubs[(var, -1)]}, f"neg{var}")
    return asm.finish(transmitter.s, {"corners": corners, "hubs": hubs})


def nae_coloring_hint(inst: Nae3SatInstance, out: ReductionOutput, assignment: dict[int, bool],
                      classes: tuple[int, int]) -> dict[int, int]:
    """Connector classes implied by an assignment (true -> first class)."""
    fixed = {}
    for idx, c in enumerate(inst.clauses):
        for pos, lit in enumerate(c):
            truth = assignment[abs(lit)] ^ (lit < 0)
            fixed[out.info["corners"][idx][pos]] = classes[0] if truth else classes[1]
    return fixed


def cubic_completion(g: Graph, k: int) -> Graph:
    """Hang a fresh N_k widget on every degree-2 vertex, making the graph cubic."""
    degs = g.degrees
    if any(d > 3 for d in degs):
        raise ValueError("cubic completion needs a subcubic graph")
    low = [v for v, d in enumerate(degs) if d < 2]
    if low:
        raise ValueError(f"vertices of degree below 2 present: {low[:5]}")
    widget = build_N_k(k)
    b = GraphBuilder(g.n)
    b.edges = set(g.edges)
    b.labels = dict(g.labels)
    for u in range(g.n):
        if degs[u] == 2:
            mapping = b.add_copy(widget.graph, tag=f"N_{k}@{u}")
            b.add_edge(u, mapping[widget.connectors[0]])
    out = b.build()
    if out.n and any(d != 3 for d in out.degrees):
        raise AssertionError("completion did not produce a cubic graph")
    return out


def _check_kcol(i: int, s: SList) -> None:
    if i < 2 or len(s) <= i or s[0] != i or s[i] != i:
        raise ValueError(f"needs s_1 = s_(i+1) = i with i > 1, got i={i}, s={s}")
    if len(s) < math.ceil(3 * i / 2):
        raise ValueError("needs |S| >= ceil(3i/2)")
    if s.count(i) < 3:
        raise ValueError("needs at least three entries equal to i")


def reduce_kcol_to_scol(g: Graph, i: int, s) -> ReductionOutput:
    """N_i(S)-coloring of g into S-COL: one G_deg(v) per vertex, one J per edge."""
    s = as_slist(s)
    _check_kcol(i, s)
    degs = g.degrees
    if any(d == 0 for d in degs):
        raise ValueError("isolated vertices are not supported; drop them first")
    J = build_J_iS(i, s)
    G_cache: dict[int, Gadget] = {}
    asm = _Assembly()
    free: dict[int, list[int]] = {}
    for v in range(g.n):
        d = degs[v]
        if d not in G_cache:
            G_cache[d] = build_G_d(i, s, d)
        gd = G_cache[d]
        mapping = asm.b.add_copy(gd.graph, tag=f"vertex:{v}:G_{d}")
        free[v] = [mapping[c] for c in gd.connectors]
        for c in free[v]:
            asm.b.tags[c] = f"vertex:{v}:original"
    originals = {v: list(free[v]) for v in free}
    for u, v in g.sorted_edges():
        asm.paste(J, {0: free[u].pop(), 1: free[v].pop()}, f"edge{u}-{v}")
    return asm.finish(s, {"originals": originals, "J_rank_condition": J.meta["rank_condition"]})


def lift_clique_join(g: Graph, s, ell: int) -> ReductionOutput:
    """S-COL into S'-COL with S' = S + (ell,) via pendant paths and a joined clique."""
    s = as_slist(s)
    if len(s) < 3 or s[1] != 1:
        raise ValueError("needs s_1 = s_2 = 1 and |S| >= 3")
    if ell < s[-1] or ell < 2:
        raise ValueError(f"needs ell >= max(2, s_|S|) = {max(2, s[-1])}")
    join = len(s) - s.count(ell) - 1
    if join < 1:
        raise ValueError(f"join set |S| - N_ell(S) - 1 = {join} is empty")
    if g.n == 0:
        raise ValueError("empty graph")
    b = GraphBuilder(g.n)
    b.edges = set(g.edges)
    b.tags = {v: "original" for v in range(g.n)}
    ends = []
    for v in range(g.n):
        path = b.add_vertices(ell - 1, tag=f"path:{v}")
        b.add_path([v] + path)
        ends.append(path[-1])
    m_f = b.add_vertex("m_f")
    b.add_edge(m_f, ends[0])
    clique = b.add_vertices(len(s) + 1, tag="clique")
    for a, c in itertools.combinations(clique, 2):
        b.add_edge(a, c)
    for q in clique[:join]:
        for x in ends + [m_f]:
            b.add_edge(q, x)
    out = b.build()
    prov = {v: b.tags[v] for v in range(out.n)}
    return ReductionOutput(out, prov, SList(tuple(s) + (ell,)), {"m": ends, "m_f": m_f})


def subdivision_targets(s) -> list[SList]:
    """All S' with s'_1 = 1 and s'_(t+1) in {2 s_t, 2 s_t + 1}."""
    s = as_slist(s)
    out = []
    for choice in itertools.product((0, 1), repeat=len(s)):
        vals = (1,) + tuple(2 * x + c for x, c in zip(s, choice))
        if all(a <= b for a, b in zip(vals, vals[1:])):
            out.append(SList(vals))
    return out


def lift_subdivision(g: Graph, s, target=None) -> ReductionOutput:
    """Every edge becomes |S|+1 parallel edges, each subdivided once."""
    s = as_slist(s)
    if not is_connected(g):
        raise ValueError("subdivision lift needs a connected graph")
    target = as_slist(target) if target is not None else SList((1,) + tuple(2 * x for x in s))
    if target not in subdivision_targets(s):
        raise ValueError(f"{target} is not a valid lifted list for {s}")
    copies = len(s) + 1
    multi = MultiGraph(g.n, tuple(e for e in g.sorted_edges() for _ in range(copies)))
    prov = {v: "original" for v in range(g.n)}
    for e in g.sorted_edges():
        for _ in range(copies):
            prov[multi.n] = f"subdivision:{e[0]}-{e[1]}"
            multi = subdivide_edge(multi, e, 1, instance=0)
    out = multi.underlying()
    return ReductionOutput(out, prov, target, {"copies": copies})
