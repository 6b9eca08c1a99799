"""Command line front end.

Every command prints one machine-readable line ``RESULT <verdict> <detail>``
first, then optional human-oriented detail. Exit codes: 0 affirmative,
1 negative, 2 usage or input error, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import characterizations as ch
from . import gadgets as gd
from . import reductions as rd
from .graph import GraphFormatError, read_graph, structure_probes, write_graph
from .solver import (DEFAULT_BUDGET, SList, SolverAborted, Status, enumerate_colorings,
                     packing_chromatic_number, read_coloring, solve, verify_coloring,
                     write_coloring)

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_ABORTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _slist(text: str) -> SList:
    try:
        return SList.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path: str | None, text: str):
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


def _graph(path: str):
    return read_graph(_read_text(path))


def _result(verdict: str, detail: str = "") -> None:
    print(f"RESULT {verdict} {detail}".rstrip())


def _fmt(s) -> str:
    return ",".join(map(str, s))


# --- commands ----------------------------------------------------------------

def cmd_solve(a) -> int:
    g = _graph(a.graph)
    v = solve(g, a.s, budget=a.budget)
    _result(v.status.value, f"nodes={v.nodes}")
    if v.colorable:
        sys.stdout.write(write_coloring(v.coloring, a.s))
        _write_text(a.out, write_coloring(v.coloring, a.s))
    return {Status.COLORABLE: EXIT_YES, Status.NOT_COLORABLE: EXIT_NO}.get(v.status, EXIT_ABORTED)


def cmd_verify(a) -> int:
    g = _graph(a.graph)
    s_file, c = read_coloring(_read_text(a.coloring))
    s = a.s or s_file
    if s is None:
        raise UsageError("no SList given (use --s or an 's' line in the coloring file)")
    try:
        chk = verify_coloring(g, s, c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if chk:
        _result("valid", f"s={_fmt(s)}")
        return EXIT_YES
    x = chk.violation
    _result("invalid", f"u={x.u + 1} v={x.v + 1} class={x.cls}")
    return EXIT_NO


def cmd_enumerate(a) -> int:
    g = _graph(a.graph)
    e = enumerate_colorings(g, a.s, cap=a.cap, budget=a.budget)
    _result("count", f"{len(e.colorings)}" + (" truncated" if e.truncated else ""))
    for c in e.colorings:
        print(" ".join(map(str, c)))
    return EXIT_YES if e.colorings else EXIT_NO


def cmd_chromatic(a) -> int:
    g = _graph(a.graph)
    k = packing_chromatic_number(g, a.max_k, budget=a.budget)
    if k is None:
        _result("exceeds", f"max_k={a.max_k}")
        return EXIT_NO
    _result("chi", str(k))
    return EXIT_YES


def _print_classification(c) -> int:
    tag = c.evidence[0].split()[0] if c.evidence else "no-rule"
    _result(c.verdict, tag)
    for line in c.evidence:
        print(f"  {line}")
    return EXIT_YES if c.verdict == ch.Complexity.POLYNOMIAL else EXIT_NO


def cmd_classify(a) -> int:
    return _print_classification(ch.classify(a.s, obstruction_n=a.obstruction_n))


def cmd_table(a) -> int:
    try:
        c = ch.classify_graph_class(a.s, a.graph_class)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _print_classification(c)


def _gadget(a):
    try:
        return gd.build_named_gadget(a.name, a.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_gadget_list(a) -> int:
    _result("gadgets", str(len(gd.CATALOG)))
    for name in gd.CATALOG:
        print(f"  {name}")
    return EXIT_YES


def cmd_gadget_build(a) -> int:
    gad = _gadget(a)
    g = gad.graph
    text = write_graph(g)
    _result("built", f"name={gad.name} n={g.n} m={g.m} connectors="
            + ",".join(str(c + 1) for c in gad.connectors))
    _write_text(a.out or "-", text)
    return EXIT_YES


def cmd_gadget_dump(a) -> int:
    # stdout is a plain graph file, so no RESULT line here
    gad = _gadget(a)
    role = f"{gad.role.kind}({gad.role.i},{gad.role.j})" if gad.role else "none"
    labels = {c: f"conn{idx}" for idx, c in enumerate(gad.connectors, 1)}
    g = gad.graph.with_labels(labels)
    print(f"# {gad.name} s={_fmt(gad.s)} role={role}")
    sys.stdout.write(write_graph(g))
    return EXIT_YES


def _check_one(name, k, budget):
    rep = gd.verify_gadget(gd.build_named_gadget(name, k), budget=budget)
    return rep


def _report_line(rep) -> str:
    bits = [f"universal={'yes' if rep.universal_ok else 'no'}",
            f"existential={'yes' if rep.existential_ok else 'no'}",
            f"nodes={rep.nodes}"]
    if rep.inconclusive:
        bits.append("inconclusive")
    return f"name={rep.name} " + " ".join(bits)


def cmd_gadget_check(a) -> int:
    if a.all:
        names = [(n, None) for n in ("L_122", "J_122", "H_122", "L_2", "J_2", "H_2",
                                     "L_3", "J_3", "H_3", "Lp_2233", "Jp_2233", "Hp_2233")]
    else:
        if a.name is None:
            raise UsageError("gadget check needs --name or --all")
        _gadget(a)
        names = [(a.name, a.k)]
    if a.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(a.jobs) as pool:
            reps = list(pool.map(_check_one, *zip(*names), [a.budget] * len(names)))
    else:
        reps = [_check_one(n, k, a.budget) for n, k in names]
    if any(r.inconclusive for r in reps):
        verdict, code = "aborted", EXIT_ABORTED
    elif all(r.ok for r in reps):
        verdict, code = "verified", EXIT_YES
    else:
        verdict, code = "refuted", EXIT_NO
    _result(verdict, _report_line(reps[0]) if len(reps) == 1 else f"gadgets={len(reps)}")
    for r in reps:
        if len(reps) > 1:
            print(f"  {_report_line(r)}")
        for note in r.notes:
            print(f"  note: {note}")
        if r.failing_config is not None:
            print(f"  failing configuration: {r.failing_config}")
    return code


def _emit_reduction(a, out) -> int:
    g = out.graph
    p = structure_probes(g)
    _result("built", f"n={g.n} m={g.m} s={_fmt(out.target_s)}")
    print(f"  connected={p.is_connected} bipartite={p.is_bipartite} subcubic={p.is_subcubic}")
    _write_text(a.out, write_graph(g))
    if getattr(a, "provenance", None):
        _write_text(a.provenance, rd.write_provenance(out))
    if getattr(a, "solve", False):
        v = solve(g, out.target_s, budget=a.budget)
        print(f"  solve: {v.status.value} nodes={v.nodes}")
        return {Status.COLORABLE: EXIT_YES, Status.NOT_COLORABLE: EXIT_NO}.get(v.status, EXIT_ABORTED)
    return EXIT_YES


def cmd_reduce_nae(a) -> int:
    inst = rd.read_cnf(_read_text(a.cnf))
    trip = [gd.build_named_gadget(n) for n in ("L_122", "J_122", "H_122")]
    out = rd.reduce_nae_to_scol(inst, *trip, budget=min(a.budget, 5_000_000))
    return _emit_reduction(a, out)


def cmd_reduce_kcol(a) -> int:
    out = rd.reduce_kcol_to_scol(_graph(a.graph), a.i, a.s)
    return _emit_reduction(a, out)


def cmd_reduce_clique(a) -> int:
    out = rd.lift_clique_join(_graph(a.graph), a.s, a.ell)
    return _emit_reduction(a, out)


def cmd_reduce_subdiv(a) -> int:
    out = rd.lift_subdivision(_graph(a.graph), a.s, a.target)
    return _emit_reduction(a, out)


def cmd_reduce_cubic(a) -> int:
    g = rd.cubic_completion(_graph(a.graph), a.k)
    _result("built", f"n={g.n} m={g.m} cubic={structure_probes(g).is_cubic}")
    _write_text(a.out, write_graph(g))
    return EXIT_YES


def cmd_tree_check(a) -> int:
    g = _graph(a.graph)
    r = ch.tree_122_check(g)
    if r.colorable:
        _result("colorable", r.method)
        sys.stdout.write(write_coloring(r.coloring, ch.S122))
        return EXIT_YES
    if r.witness is not None:
        w = r.witness
        _result("not-colorable", f"member_n={w.member.n}")
        emb = " ".join(f"{p + 1}->{h + 1}" for p, h in sorted(w.embedding.items()))
        print(f"  embedding {emb}")
    else:
        _result("not-colorable", r.method)
    return EXIT_NO


def cmd_family_t(a) -> int:
    members = ch.generate_family_T(a.max_n)
    _result("members", f"{len(members)} sizes=" + ",".join(str(g.n) for g in members))
    if a.out_dir:
        os.makedirs(a.out_dir, exist_ok=True)
        for idx, g in enumerate(members):
            _write_text(os.path.join(a.out_dir, f"T{idx}_n{g.n}.g"), write_graph(g))
    return EXIT_YES


def cmd_y_obstruction(a) -> int:
    n = ch.yn_obstruction(a.s, a.max_n, budget=a.budget)
    if n is None:
        _result("none", f"max_n={a.max_n}")
        return EXIT_NO
    _result("obstruction", f"n={n}")
    return EXIT_YES


def cmd_witness_build(a) -> int:
    path = a.script
    w = ch.parse_witness(_read_text(path), None if path == "-" else os.path.dirname(path))
    g, c = ch.build_from_witness(w, a.s)
    _result("built", f"n={g.n} m={g.m} regime={w.regime}")
    sys.stdout.write(write_coloring(c, a.s))
    _write_text(a.out, write_graph(g))
    return EXIT_YES


# --- parser ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                   help="search-node budget (default %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized generators")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="spackcol", description="S-packing coloring toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, func, helptext, parent=sub):
        p = parent.add_parser(name, help=helptext)
        _common(p)
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, "decide S-colorability of a graph")
    p.add_argument("--s", type=_slist, required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--out")

    p = add("verify", cmd_verify, "check a coloring file")
    p.add_argument("--s", type=_slist)
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring", required=True)

    p = add("enumerate", cmd_enumerate, "list colorings up to class symmetry")
    p.add_argument("--s", type=_slist, required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--cap", type=_positive, default=10_000)

    p = add("chromatic", cmd_chromatic, "packing chromatic number")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-k", type=_positive, default=10)

    p = add("classify", cmd_classify, "complexity of S-COL")
    p.add_argument("--s", type=_slist, required=True)
    p.add_argument("--obstruction-n", type=int, default=6,
                   help="largest Y_n tried for long lists (0 disables)")

    p = add("table", cmd_table, "complexity by graph class for |S|=3")
    p.add_argument("--s", type=_slist, required=True)
    p.add_argument("--class", dest="graph_class", required=True, choices=ch.GRAPH_CLASSES)

    gp = sub.add_parser("gadget", help="gadget catalog")
    gsub = gp.add_subparsers(dest="gadget_command", required=True)
    add("list", cmd_gadget_list, "list catalog names", gsub)
    p = add("dump", cmd_gadget_dump, "print a gadget as a graph file with connector labels", gsub)
    p.add_argument("name")
    p.add_argument("--k", type=_positive)
    for name, func in (("build", cmd_gadget_build), ("check", cmd_gadget_check)):
        p = add(name, func, f"{name} a gadget", gsub)
        p.add_argument("--name", required=(name == "build"))
        p.add_argument("--k", type=_positive)
        if name == "build":
            p.add_argument("--out")
        else:
            p.add_argument("--all", action="store_true", help="check the whole suite")

    rp = sub.add_parser("reduce", help="build reduction instances")
    rsub = rp.add_subparsers(dest="reduce_command", required=True)

    def red(name, func, helptext, needs_s=True):
        p = add(name, func, helptext, rsub)
        if needs_s:
            p.add_argument("--s", type=_slist, required=True)
        p.add_argument("--out")
        p.add_argument("--provenance")
        p.add_argument("--solve", action="store_true", help="also solve the output")
        return p

    p = red("nae", cmd_reduce_nae, "NAE-3SAT (DIMACS) into (1,2,2)-COL", needs_s=False)
    p.add_argument("--cnf", required=True)
    p = red("kcol", cmd_reduce_kcol, "k-COL into S-COL")
    p.add_argument("--graph", required=True)
    p.add_argument("--i", type=_positive, required=True)
    p = red("clique-lift", cmd_reduce_clique, "append ell to the list")
    p.add_argument("--graph", required=True)
    p.add_argument("--ell", type=_positive, required=True)
    p = red("subdiv-lift", cmd_reduce_subdiv, "subdivide parallel edges")
    p.add_argument("--graph", required=True)
    p.add_argument("--target", type=_slist)
    p = add("cubic", cmd_reduce_cubic, "complete a subcubic graph to a cubic one", rsub)
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--out")

    p = add("tree-check", cmd_tree_check, "(1,2,2)-colorability of a tree")
    p.add_argument("--graph", required=True)

    p = add("family-t", cmd_family_t, "generate the forbidden trees")
    p.add_argument("--max-n", type=int, default=16)
    p.add_argument("--out-dir")

    p = add("y-obstruction", cmd_y_obstruction, "smallest Y_n that is not S-colorable")
    p.add_argument("--s", type=_slist, required=True)
    p.add_argument("--max-n", type=_positive, default=6)

    p = add("witness-build", cmd_witness_build, "build a graph and coloring from a script")
    p.add_argument("--s", type=_slist, required=True)
    p.add_argument("--script", required=True)
    p.add_argument("--out")
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_YES
    try:
        return args.func(args)
    except SolverAborted as exc:
        _result("aborted", str(exc))
        return EXIT_ABORTED
    except (UsageError, GraphFormatError, ch.WitnessError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
