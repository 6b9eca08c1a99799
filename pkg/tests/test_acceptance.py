"""Acceptance sweep: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``; the lines are printed either way.
"""
import itertools
import json
import pathlib
import random
import sys
import time

import networkx as nx
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))
from oracles import atlas_graphs, looser, naive_colorable, random_graph  # noqa: E402

from spackcol.characterizations import (POLY_MAXIMA, Complexity, classify,  # noqa: E402
                                        classify_graph_class, family_T0, family_T1,
                                        tree_122_check)
from spackcol.gadgets import (build_L_iS, build_named_gadget, build_R_iS,  # noqa: E402
                              verify_gadget)
from spackcol.graph import (Graph, build_complete, build_path, build_spider_y,  # noqa: E402
                            is_connected)
from spackcol.reductions import (enumerate_nae_instances, lift_clique_join,  # noqa: E402
                                 lift_subdivision, nae_brute_force, reduce_kcol_to_scol,
                                 reduce_nae_to_scol, split_components)
from spackcol.solver import (DEFAULT_BUDGET, ConstraintSet, Status, slist_leq, solve,  # noqa: E402
                             solve_constrained, verify_coloring)

# tolerances, all taken from the criteria
OBSTRUCTION_SECONDS = 5.0
TREE_MAX_N = 12
TREE_RANDOM_COUNT, TREE_RANDOM_N = 1000, 16
TREE_SECONDS = 600.0
GADGET_BUDGET = 50_000_000
GADGET_SECONDS = 1800.0
NAE_CLAUSES, NAE_VARS = 2, 3
LIFT_MAX_N = 5
CLIQUE_SAMPLES = 200
ORACLE_MAX_N = 6
ORACLE_LISTS = [(1, 1), (1, 2), (1, 2, 2), (1, 1, 2), (2, 2, 3)]
PROPERTY_SAMPLES = 500

_LINES = {}


def report(num: int, ok: bool, detail: str):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    _LINES[num] = line
    sys.__stdout__.write("\n" + line + "\n")
    sys.__stdout__.flush()
    return ok


def criterion_1():
    cases = [("Y_2", build_spider_y(2), (2, 3, 3, 3)), ("Y_4", build_spider_y(4), (2, 2, 3, 4)),
             ("Y_3", build_spider_y(3), (1, 4, 4, 4)), ("P_16", build_path(16), (1, 3, 5, 8)),
             ("K_4", build_complete(4), (1, 1, 1))]
    bad, slowest = [], 0.0
    for name, g, s in cases:
        t0 = time.perf_counter()
        v = solve(g, s)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if v.status is not Status.NOT_COLORABLE or dt >= OBSTRUCTION_SECONDS:
            bad.append(f"{name}:{v.status.value}:{dt:.2f}s")
    return report(1, not bad, f"5 obstructions, slowest {slowest:.3f}s" + (f" bad={bad}" if bad else ""))


def _trees_upto(n_max):
    yield Graph(1, ())
    for n in range(2, n_max + 1):
        for t in nx.nonisomorphic_trees(n):
            yield Graph.from_networkx(t)


def criterion_2():
    t0 = time.perf_counter()
    s = (1, 2, 2)
    members_ok = all(solve(t, s).status is Status.NOT_COLORABLE for t in (family_T0(), family_T1()))
    mismatches, count = 0, 0
    for t in _trees_upto(TREE_MAX_N):
        count += 1
        res = tree_122_check(t)
        if res.colorable != solve(t, s).colorable:
            mismatches += 1
    rng = random.Random(2016)
    for _ in range(TREE_RANDOM_COUNT):
        t = Graph.from_networkx(nx.random_labeled_tree(TREE_RANDOM_N, seed=rng.randrange(2**31)))
        res = tree_122_check(t)
        if res.colorable != solve(t, s).colorable:
            mismatches += 1
    dt = time.perf_counter() - t0
    ok = members_ok and mismatches == 0 and dt < TREE_SECONDS
    return report(2, ok, f"T0/T1 blocked={members_ok}, {count} small trees + "
                         f"{TREE_RANDOM_COUNT} random, mismatches={mismatches}, {dt:.1f}s")


GADGET_SUITE = ["L_122", "J_122", "H_122", "L_2", "J_2", "H_2", "L_3", "J_3", "H_3",
                "Lp_2233", "Jp_2233", "Hp_2233"]


def criterion_3():
    t0 = time.perf_counter()
    failed = []
    for name in GADGET_SUITE:
        rep = verify_gadget(build_named_gadget(name), budget=GADGET_BUDGET)
        if rep.inconclusive or not (rep.universal_ok and rep.existential_ok):
            why = "inconclusive" if rep.inconclusive else (
                "universal" if not rep.universal_ok else f"existential{rep.failing_config}")
            failed.append(f"{name}[{why}]")
    dt = time.perf_counter() - t0
    ok = not failed and dt < GADGET_SECONDS
    return report(3, ok, f"{len(GADGET_SUITE) - len(failed)}/{len(GADGET_SUITE)} gadgets verified, "
                         f"{dt:.1f}s" + (f"; failed: {' '.join(failed)}" if failed else ""))


def criterion_4():
    L, J, H = (build_named_gadget(n) for n in ("L_122", "J_122", "H_122"))
    insts = enumerate_nae_instances(NAE_CLAUSES, NAE_VARS, connected_only=False)
    wrong, audits, outputs = 0, 0, 0
    for inst in insts:
        verdicts = []
        for part in split_components(inst):
            out = reduce_nae_to_scol(part, L, J, H)
            g = out.graph
            outputs += 1
            if not (is_connected(g) and max(g.degrees) <= 3 and nx.is_bipartite(g.to_networkx())):
                audits += 1
            v = solve(g, out.target_s)
            verdicts.append(v.colorable if not v.aborted else None)
        got = None if None in verdicts else all(verdicts)
        if got != (nae_brute_force(inst) is not None):
            wrong += 1
    return report(4, wrong == 0 and audits == 0,
                  f"{len(insts)} instances ({outputs} reduced graphs), discrepancies={wrong}, "
                  f"audit failures={audits}")


def criterion_5():
    golden = json.loads((pathlib.Path(__file__).parent / "golden" / "gadgets.json").read_text())
    s = (2, 2, 2, 3)
    L = build_L_iS(2, s)
    rank = L.meta["rank"]
    pendants = sorted(r for r in set(rank) if rank.count(r) == 2)
    want = golden["L_iS(2,2223)"]
    fig_ok = (L.graph.n == 30 and pendants == [-8, -4, 0, 4, 8]
              and [list(e) for e in L.graph.sorted_edges()] == want["edges"])
    R = build_R_iS(2, s)
    radius2 = [c for c in range(1, len(s) + 1) if s[c - 1] == 2]
    r_ok = R.graph.n == 6
    for cfg in itertools.product(range(1, len(s) + 1), repeat=3):
        v = solve_constrained(R.graph, s, ConstraintSet(fixed=dict(zip(R.connectors, cfg))))
        allowed = cfg[0] == cfg[1] == cfg[2] and cfg[0] in radius2
        if v.aborted or v.colorable != allowed:
            r_ok = False
    out = reduce_kcol_to_scol(build_complete(3), 2, s)
    v = solve(out.graph, out.target_s, budget=DEFAULT_BUDGET)
    k3_ok = v.colorable and verify_coloring(out.graph, out.target_s, v.coloring)
    return report(5, fig_ok and r_ok and k3_ok,
                  f"L_iS n={L.graph.n} pendants={pendants} ok={fig_ok}; R n={R.graph.n} "
                  f"forcing ok={r_ok}; K_3 -> n={out.graph.n} {v.status.value} nodes={v.nodes}")


def criterion_6():
    bad, checked = [], 0
    for g in atlas_graphs(LIFT_MAX_N):
        if not is_connected(g):
            continue
        bip = nx.is_bipartite(g.to_networkx())
        for target in ((1, 2, 2), (1, 3, 3)):
            out = lift_subdivision(g, (1, 1), target)
            v = solve(out.graph, target)
            checked += 1
            if v.aborted or v.colorable != bip:
                bad.append((sorted(g.edges), target))
    rng = random.Random(35)
    clique_bad = 0
    for _ in range(CLIQUE_SAMPLES):
        g = random_graph(rng, 1, LIFT_MAX_N)
        out = lift_clique_join(g, (1, 1, 2), 2)
        v = solve(out.graph, out.target_s)
        if v.aborted or v.colorable != naive_colorable(g, (1, 1, 2)):
            clique_bad += 1
    return report(6, not bad and clique_bad == 0,
                  f"subdivision: {checked} checks, discrepancies={len(bad)}; "
                  f"clique-join: {CLIQUE_SAMPLES} samples, discrepancies={clique_bad}")


def _rule(s):
    if len(s) <= 2:
        return Complexity.POLYNOMIAL
    if len(s) == 3:
        return Complexity.NP_COMPLETE if s == (1, 2, 2) or s[:2] == (1, 1) else Complexity.POLYNOMIAL
    return (Complexity.POLYNOMIAL if any(slist_leq(s, m) for m in POLY_MAXIMA)
            else Complexity.NP_COMPLETE)


TABLE_PRINTED = {
    "arbitrary": ("np-complete", "np-complete", "np-complete"),
    "subcubic": ("polynomial", "np-complete", "np-complete"),
    "cubic": ("polynomial", "polynomial", "np-complete"),
    "bipartite": ("polynomial", "np-complete", "polynomial"),
    "tree": ("polynomial", "polynomial", "polynomial"),
}


def criterion_7():
    lists = (list(itertools.combinations_with_replacement(range(1, 7), 3))
             + list(itertools.combinations_with_replacement(range(1, 9), 4)))
    unknown = sum(classify(s).verdict == Complexity.UNKNOWN for s in lists)
    off_rule = [s for s in lists if classify(s).verdict != _rule(s)]
    fixtures = {(1, 2, 2): Complexity.NP_COMPLETE, (2, 3, 3, 3): Complexity.POLYNOMIAL,
                (2, 2, 3, 3): Complexity.NP_COMPLETE, (1, 3, 5, 8): Complexity.POLYNOMIAL,
                (1, 1, 1, 1): Complexity.NP_COMPLETE}
    fixtures.update({(2, 2, 2, k): Complexity.NP_COMPLETE for k in range(2, 9)})
    fix_bad = [s for s, want in fixtures.items() if classify(s).verdict != want]
    table_bad = [(cls, s) for cls, row in TABLE_PRINTED.items()
                 for s, want in zip([(1, 1, 1), (1, 2, 2), (1, 1, 2), (1, 1, 7)], row + row[2:])
                 if classify_graph_class(s, cls).verdict != want]
    ok = unknown == 0 and not off_rule and not fix_bad and not table_bad
    return report(7, ok, f"{len(lists)} lists, unknown={unknown}, off-rule={len(off_rule)}, "
                         f"fixture misses={len(fix_bad)}, table misses={len(table_bad)}")


def criterion_8():
    graphs = list(atlas_graphs(ORACLE_MAX_N))
    wrong = 0
    for g in graphs:
        for s in ORACLE_LISTS:
            if solve(g, s).colorable != naive_colorable(g, s):
                wrong += 1
    rng = random.Random(500)
    prop_bad = 0
    for _ in range(PROPERTY_SAMPLES):
        g = random_graph(rng, 1, 8)
        s = tuple(sorted(rng.randint(1, 4) for _ in range(rng.randint(1, 4))))
        v = solve(g, s)
        if v.aborted:
            prop_bad += 1
            continue
        if not v.colorable:
            continue
        weaker = looser(rng, s)
        keep = [x for x in range(g.n) if rng.random() < 0.6] or [0]
        sub, idx = g.induced(keep)
        if not (verify_coloring(g, s, v.coloring) and solve(g, weaker).colorable
                and verify_coloring(sub, s, [v.coloring[x] for x in idx])):
            prop_bad += 1
    return report(8, wrong == 0 and prop_bad == 0,
                  f"{len(graphs)} graphs x {len(ORACLE_LISTS)} lists, disagreements={wrong}; "
                  f"{PROPERTY_SAMPLES} property samples, violations={prop_bad}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(crit):
    assert crit(), _LINES[int(crit.__name__.rsplit("_", 1)[1])]


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print("\n".join(_LINES[i] for i in range(1, 9)))
    sys.exit(0 if all(results) else 1)
