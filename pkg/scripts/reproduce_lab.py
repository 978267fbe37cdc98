"""Print the verdicts and witnesses of the lab checks on the built-in algebras."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from halg import lab
from halg.hyper import short_term
from halg.terms import format_term
from halg.zoo import lattices_up_to, standard_algebras


@dataclass
class Config:
    max_arity: int = 3
    lattice_bound: int = 5


def fmt(A, values):
    return "(" + ",".join(A.label(v) for v in values) + ")"


def main(cfg: Config):
    zoo = standard_algebras()
    groupoids = [A for A in zoo.values() if A.sig.name == "G"]
    lattices = lattices_up_to(cfg.lattice_bound)

    print("# abelian up to arity", cfg.max_arity)
    for A in list(zoo.values()):
        v = lab.is_abelian(A, cfg.max_arity)
        line = f"{A.name:6s} {'yes' if v else 'no'}"
        if not v:
            w = v.witness
            line += f"  term={format_term(w.term, A.sig, compact=True)} u={A.label(w.u)} v={A.label(w.v)}"
        print(line)

    print("\n# medial hyperidentity over all binary images")
    for A in groupoids:
        print(f"{A.name:6s} {'holds' if lab.check_medial(A) else 'fails'}")

    print(f"\n# rectangular-band hyperidentities up to arity {cfg.max_arity}")
    for A in groupoids:
        v = lab.check_rb_hyperidentities(A, cfg.max_arity)
        line = f"{A.name:6s} {'holds' if v else 'fails'}"
        if not v:
            w = v.witness
            line += f"  arity={w.arity} law={w.law} F={format_term(w.image, A.sig, compact=True)}"
        print(line)

    print(f"\n# lattices up to size {cfg.lattice_bound}: SD_join SD_meet hyper")
    for L in lattices:
        sj, sm = lab.semidistributivity(L)
        h = lab.check_prop23(L)
        line = f"{L.name:8s} {bool(sj)!s:5s} {bool(sm)!s:5s} {bool(h)!s:5s}"
        if not h:
            w = h.witness
            line += f"  F={short_term(w.F, L.sig)} G={short_term(w.G, L.sig)} at {fmt(L, w.assignment)}"
        print(line)

    print("\n# derived closure of {Z2, LZ2, RZ2, T}")
    K = [zoo[n] for n in ("Z2", "LZ2", "RZ2", "T")]
    v = lab.check_derived_closed(K)
    print("closed" if v else f"escapes: {K[v.witness.algebra].name} via {v.witness.sigma.describe()}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-arity", type=int, default=Config.max_arity)
    p.add_argument("--lattice-bound", type=int, default=Config.lattice_bound)
    a = p.parse_args()
    main(Config(a.max_arity, a.lattice_bound))
