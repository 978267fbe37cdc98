"""Workbench files: named signatures, algebras, terms, quasi-identities,
hypersubstitutions, monoids and spectra.

    signature G { plus/2 }
    algebra Z2 : G { size 2  op plus = [0, 1, 1, 0] }
    term t : G = plus(x0, x1)
    quasi cancel : G { arity 3  plus(x0, x1) = plus(x0, x2) => x1 = x2 }
    hypersub swap : G { plus -> plus(x1, x0) }
    monoid swaps : G { id, swap }
    monoid everything : G all-mod Z2
    monoid gen : G generated { swap }
    spectrum S : G { poset 0<=1  algebra 0 = Z4  algebra 1 = Z2  map 0->1 = [0, 1, 0, 1] }

An algebra block may also carry ``names [0, a, b, c, 1]`` to label its
elements. ``id`` always names the identity hypersubstitution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .algebra import AlgebraError, FiniteAlgebra, QuasiIdentity
from .constructions import DirectSpectrum, SpectrumError
from .hyper import (HyperMonoid, Hypersubstitution, MonoidError, all_hypersubstitutions_mod,
                    monoid_closure)
from .terms import Signature, Term, TermError, TermSyntaxError, TokenStream
from . import zoo


class WorkspaceError(ValueError):
    pass


KINDS = ("signature", "algebra", "term", "quasi", "hypersub", "monoid", "spectrum")


@dataclass
class Workspace:
    signatures: dict[str, Signature] = field(default_factory=dict)
    algebras: dict[str, FiniteAlgebra] = field(default_factory=dict)
    terms: dict[str, tuple[Signature, Term]] = field(default_factory=dict)
    quasis: dict[str, QuasiIdentity] = field(default_factory=dict)
    hypersubs: dict[str, Hypersubstitution] = field(default_factory=dict)
    monoids: dict[str, HyperMonoid] = field(default_factory=dict)
    spectra: dict[str, DirectSpectrum] = field(default_factory=dict)
    depth_cap: int = 12
    # names that may be redeclared once (prelude entries)
    _shadowable: set = field(default_factory=set, repr=False)

    def _table(self, kind: str) -> dict:
        return {"signature": self.signatures, "algebra": self.algebras, "term": self.terms,
                "quasi": self.quasis, "hypersub": self.hypersubs, "monoid": self.monoids,
                "spectrum": self.spectra}[kind]

    def _declare(self, kind, name, value):
        table = self._table(kind)
        if name in table and (kind, name) not in self._shadowable:
            raise WorkspaceError(f"duplicate {kind} {name!r}")
        self._shadowable.discard((kind, name))
        table[name] = value

    def get(self, kind: str, name: str):
        try:
            return self._table(kind)[name]
        except KeyError:
            raise WorkspaceError(f"unknown {kind} {name!r}") from None

    def hypersub(self, name: str, sig: Signature) -> Hypersubstitution:
        if name == "id" and "id" not in self.hypersubs:
            return Hypersubstitution.identity(sig)
        h = self.get("hypersub", name)
        if h.sig != sig:
            raise WorkspaceError(f"hypersub {name!r} has a different signature")
        return h

    def loads(self, src: str, filename: str = "<string>") -> "Workspace":
        try:
            _Loader(self, TokenStream(src)).run()
        except TermSyntaxError as e:
            raise WorkspaceError(f"{filename}:{e.line}:{e.col}: {e.args[0].rsplit(' at line', 1)[0]}") from None
        except WorkspaceError as e:
            raise WorkspaceError(f"{filename}: {e}") from None
        return self

    def load_file(self, path) -> "Workspace":
        path = Path(path)
        return self.loads(path.read_text(encoding="utf-8"), str(path))


def load(files: Iterable = (), prelude: bool = True, depth_cap: int = 12) -> Workspace:
    ws = prelude_workspace() if prelude else Workspace()
    ws.depth_cap = depth_cap
    for f in files:
        ws.load_file(f)
    return ws


class _Loader:
    def __init__(self, ws: Workspace, ts: TokenStream):
        self.ws = ws
        self.ts = ts

    def run(self):
        ts = self.ts
        while ts.peek.kind != "eof":
            tok = ts.ident()
            if tok.text not in KINDS:
                raise ts.error(f"expected a declaration ({', '.join(KINDS)}), found {tok.text!r}", tok)
            getattr(self, "_" + tok.text)()

    def _head(self):
        name = self.ts.ident().text
        self.ts.expect(":")
        sig_tok = self.ts.ident()
        try:
            sig = self.ws.get("signature", sig_tok.text)
        except WorkspaceError as e:
            raise self.ts.error(str(e), sig_tok) from None
        return name, sig

    def _int_list(self):
        ts = self.ts
        ts.expect("[")
        out = []
        if not ts.at("]"):
            out.append(ts.number())
            while ts.accept(","):
                out.append(ts.number())
        ts.expect("]")
        return out

    def _signature(self):
        ts = self.ts
        name = ts.ident().text
        ts.expect("{")
        syms = []
        while not ts.accept("}"):
            sym = ts.ident().text
            ts.expect("/")
            syms.append((sym, ts.number()))
            ts.accept(",")
        try:
            self.ws._declare("signature", name, Signature(tuple(syms), name))
        except TermError as e:
            raise WorkspaceError(f"signature {name}: {e}") from None

    def _algebra(self):
        ts = self.ts
        name, sig = self._head()
        ts.expect("{")
        ts.expect("size")
        size = ts.number()
        labels = None
        tables: dict[str, list[int]] = {}
        while not ts.accept("}"):
            if ts.accept("names"):
                ts.expect("[")
                labels = []
                while not ts.accept("]"):
                    tok = ts.next()
                    if tok.kind not in ("ident", "num"):
                        raise ts.error("expected element name", tok)
                    labels.append(tok.text)
                    ts.accept(",")
                continue
            ts.expect("op")
            sym_tok = ts.ident()
            if sym_tok.text not in {s for s, _ in sig.symbols}:
                raise ts.error(f"algebra {name}: unknown symbol {sym_tok.text!r}", sym_tok)
            if sym_tok.text in tables:
                raise ts.error(f"algebra {name}: table for {sym_tok.text} given twice", sym_tok)
            ts.expect("=")
            tables[sym_tok.text] = self._int_list()
        missing = [s for s, _ in sig.symbols if s not in tables]
        if missing:
            raise WorkspaceError(f"algebra {name}: no table for {missing[0]}")
        try:
            A = FiniteAlgebra(sig, size, [tables[s] for s, _ in sig.symbols], name, labels)
        except AlgebraError as e:
            raise WorkspaceError(f"algebra {name}: {e}") from None
        self.ws._declare("algebra", name, A)

    def _term(self):
        name, sig = self._head()
        self.ts.expect("=")
        self.ws._declare("term", name, (sig, self.ts.term(sig)))

    def _quasi(self):
        ts = self.ts
        name, sig = self._head()
        ts.expect("{")
        ts.expect("arity")
        k = ts.number()
        q = parse_quasi_body(ts, sig, k)
        ts.expect("}")
        self.ws._declare("quasi", name, q)

    def _hypersub(self):
        ts = self.ts
        name, sig = self._head()
        ts.expect("{")
        mapping = {}
        while not ts.accept("}"):
            sym_tok = ts.ident()
            if sym_tok.text not in {s for s, _ in sig.symbols}:
                raise ts.error(f"hypersub {name}: unknown symbol {sym_tok.text!r}", sym_tok)
            ts.expect("->")
            mapping[sym_tok.text] = ts.term(sig)
            ts.accept(",")
        try:
            h = Hypersubstitution.from_mapping(sig, mapping)
        except TermError as e:
            raise WorkspaceError(f"hypersub {name}: {e}") from None
        self.ws._declare("hypersub", name, h)

    def _monoid(self):
        ts = self.ts
        name, sig = self._head()
        if ts.accept("all-mod"):
            alg = self.ws.get("algebra", ts.ident().text)
            if alg.sig != sig:
                raise WorkspaceError(f"monoid {name}: algebra {alg.name} has a different signature")
            self.ws._declare("monoid", name, all_hypersubstitutions_mod(alg))
            return
        generated = ts.accept("generated")
        ts.expect("{")
        names = []
        while not ts.accept("}"):
            names.append(ts.ident().text)
            ts.accept(",")
        try:
            members = [self.ws.hypersub(n, sig) for n in names]
            if generated:
                M = monoid_closure(members, depth_cap=self.ws.depth_cap, sig=sig)
            else:
                M = HyperMonoid.explicit(members, names=names)
        except MonoidError as e:
            raise WorkspaceError(f"monoid {name}: {e}") from None
        self.ws._declare("monoid", name, M)

    def _spectrum(self):
        ts = self.ts
        name, sig = self._head()
        ts.expect("{")
        order, algebras, maps = set(), {}, {}
        while not ts.accept("}"):
            if ts.accept("poset"):
                while True:
                    i = ts.number()
                    ts.expect("<=")
                    order.add((i, ts.number()))
                    if not ts.accept(","):
                        break
            elif ts.accept("algebra"):
                i = ts.number()
                ts.expect("=")
                algebras[i] = self.ws.get("algebra", ts.ident().text)
            elif ts.accept("map"):
                i = ts.number()
                ts.expect("->")
                j = ts.number()
                ts.expect("=")
                maps[(i, j)] = tuple(self._int_list())
            else:
                raise ts.error("expected poset, algebra or map")
        points = sorted(algebras)
        if points != list(range(len(points))):
            raise WorkspaceError(f"spectrum {name}: algebras must be given for points 0..n-1")
        if any(A.sig != sig for A in algebras.values()):
            raise WorkspaceError(f"spectrum {name}: algebra signature differs from {sig.name}")
        try:
            spec = DirectSpectrum([algebras[i] for i in points], order, maps)
        except (SpectrumError, AlgebraError) as e:
            raise WorkspaceError(f"spectrum {name}: {e}") from None
        self.ws._declare("spectrum", name, spec)


def parse_quasi_body(ts: TokenStream, sig: Signature, k: int) -> QuasiIdentity:
    """``eq (& eq)* => eq`` or a single ``eq``."""
    eqs = [ts.equation(sig)]
    while ts.accept("&") or ts.accept(","):
        eqs.append(ts.equation(sig))
    if ts.accept("=>"):
        concl = ts.equation(sig)
        premises = eqs
    elif len(eqs) == 1:
        concl, premises = eqs[0], []
    else:
        raise ts.error("expected '=>' after premises")
    try:
        return QuasiIdentity(sig, k, tuple(premises), concl)
    except TermError as e:
        raise ts.error(str(e)) from None


def parse_quasi(src: str, sig: Signature, k: int) -> QuasiIdentity:
    ts = TokenStream(src)
    q = parse_quasi_body(ts, sig, k)
    ts.expect_eof()
    return q


def format_algebra(A: FiniteAlgebra, name: str | None = None) -> str:
    lines = [f"algebra {name or A.name or 'A'} : {A.sig.name or 'sig'} {{", f"  size {A.size}"]
    if A.labels:
        lines.append(f"  names [{', '.join(A.labels)}]")
    for (sym, _), tab in zip(A.sig.symbols, A.tables):
        lines.append(f"  op {sym} = [{', '.join(str(v) for v in tab.tolist())}]")
    lines.append("}")
    return "\n".join(lines)


def format_signature(sig: Signature) -> str:
    body = ", ".join(f"{s}/{a}" for s, a in sig.symbols)
    return f"signature {sig.name} {{ {body} }}"


_PRELUDE_EXTRA = """
quasi cancel : G { arity 3  plus(x0, x1) = plus(x0, x2) => x1 = x2 }
quasi comm : G { arity 2  plus(x0, x1) = plus(x1, x0) }
quasi medial : G { arity 4  plus(plus(x0, x1), plus(x2, x3)) = plus(plus(x0, x2), plus(x1, x3)) }
quasi sdjoin : Lat { arity 3  join(x0, x1) = join(x0, x2) => join(x0, x1) = join(x0, meet(x1, x2)) }
hypersub swap : G { plus -> plus(x1, x0) }
hypersub left : G { plus -> x0 }
hypersub dup : G { plus -> plus(x0, x0) }
hypersub dual : Lat { meet -> join(x0, x1)  join -> meet(x0, x1) }
monoid swaps : G { id, swap }
monoid duality : Lat { id, dual }
spectrum Z4toZ2 : G { poset 0<=1  algebra 0 = Z4  algebra 1 = Z2  map 0->1 = [0, 1, 0, 1] }
"""


def prelude_source() -> str:
    parts = [format_signature(zoo.GROUPOID), format_signature(zoo.LATTICE)]
    parts += [format_algebra(A) for A in zoo.standard_algebras().values()]
    return "\n".join(parts) + "\n" + _PRELUDE_EXTRA


def prelude_workspace() -> Workspace:
    ws = Workspace().loads(prelude_source(), "<prelude>")
    for kind in KINDS:
        ws._shadowable |= {(kind, n) for n in ws._table(kind)}
    return ws
