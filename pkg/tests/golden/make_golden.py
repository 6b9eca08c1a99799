"""Regenerate gadgets.json from the constructors (run only after a deliberate change)."""
import json
import pathlib

from spackcol.gadgets import (build_G_d, build_J_iS, build_L_iS, build_named_gadget,
                              build_R_iS)

NAMED = ["L_122", "J_122", "H_122", "L_2", "J_2", "H_2", "L_3", "J_3", "H_3",
         "N_2", "N_3", "N_6", "Lp_2233", "Jp_2233", "Hp_2233"]
S2223 = (2, 2, 2, 3)


def entries():
    for name in NAMED:
        yield name, build_named_gadget(name)
    yield "L_iS(2,2223)", build_L_iS(2, S2223)
    yield "R_iS(2,2223)", build_R_iS(2, S2223)
    yield "G_1(2,2223)", build_G_d(2, S2223, 1)
    yield "G_2(2,2223)", build_G_d(2, S2223, 2)
    yield "J_iS(2,2223)", build_J_iS(2, S2223)


def snapshot():
    out = {}
    for key, gad in entries():
        g = gad.graph
        out[key] = {"n": g.n, "edges": [list(e) for e in g.sorted_edges()],
                    "connectors": list(gad.connectors)}
    return out


if __name__ == "__main__":
    path = pathlib.Path(__file__).with_name("gadgets.json")
    path.write_text(json.dumps(snapshot(), indent=1) + "\n")
    print(f"wrote {path}")
