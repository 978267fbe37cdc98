"""Similarity types, terms, the prefix term grammar and substitution.

Terms are immutable trees: ``Var(i)`` stands for the variable ``x<i>`` and
``App(op, args)`` applies the ``op``-th symbol of a signature (declaration
index) to a tuple of argument terms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union


class TermError(ValueError):
    pass


class TermSyntaxError(TermError):
    """Raised by the parser; carries the offending source position."""

    def __init__(self, message: str, src: str = "", pos: int = 0):
        self.src = src
        self.pos = pos
        self.line = src.count("\n", 0, pos) + 1
        self.col = pos - (src.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.col}")


_VAR_NAME = re.compile(r"x[0-9]+\Z")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple((str(s), int(a)) for s, a in self.symbols))
        seen = set()
        for sym, arity in self.symbols:
            if not _IDENT.match(sym) or _VAR_NAME.match(sym):
                raise TermError(f"invalid symbol name {sym!r}")
            if sym in seen:
                raise TermError(f"duplicate symbol {sym!r}")
            if arity < 0:
                raise TermError(f"negative arity for {sym!r}")
            seen.add(sym)

    # equality ignores the display name
    def __eq__(self, other):
        return isinstance(other, Signature) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    @classmethod
    def parse(cls, src: str, name: str = "") -> "Signature":
        """``Signature.parse("meet/2, join/2")``."""
        syms = []
        for part in re.split(r"[,\s]+", src.strip()):
            if not part:
                continue
            sym, _, arity = part.partition("/")
            syms.append((sym, int(arity)))
        return cls(tuple(syms), name)

    def __len__(self):
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        for i, (sym, _) in enumerate(self.symbols):
            if sym == symbol:
                return i
        raise TermError(f"unknown symbol {symbol!r}")

    def arity(self, op: int) -> int:
        return self.symbols[op][1]

    def symbol(self, op: int) -> str:
        return self.symbols[op][0]

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.symbols)

    def __str__(self):
        body = ", ".join(f"{s}/{a}" for s, a in self.symbols)
        return f"{self.name or 'sig'} {{ {body} }}"


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise TermError("variable index must be non-negative")


@dataclass(frozen=True)
class App:
    op: int
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        # composites share subterms heavily; a cached hash keeps memo lookups O(1)
        object.__setattr__(self, "_hash", hash((self.op, self.args)))

    def __hash__(self):
        return self._hash


Term = Union[Var, App]


def app(sig: Signature, symbol: str, *args: Term) -> App:
    """Build ``symbol(args...)`` by name, checking the arity."""
    op = sig.index(symbol)
    if len(args) != sig.arity(op):
        raise TermError(f"{symbol} expects {sig.arity(op)} arguments, got {len(args)}")
    return App(op, args)


def _fold(t: Term, leaf, node, memo: dict | None = None):
    """Bottom-up fold visiting each distinct subterm once; ``memo`` may be
    shared between calls."""
    memo = {} if memo is None else memo
    stack = [t]
    while stack:
        u = stack[-1]
        if u in memo:
            stack.pop()
            continue
        if isinstance(u, Var):
            memo[u] = leaf(u)
            stack.pop()
            continue
        todo = [a for a in u.args if a not in memo]
        if todo:
            stack.extend(todo)
            continue
        memo[u] = node(u, [memo[a] for a in u.args])
        stack.pop()
    return memo[t]


def variables(t: Term) -> set[int]:
    return set(_fold(t, lambda v: frozenset((v.index,)), lambda u, vs: frozenset().union(*vs)))


def max_var(t: Term) -> int:
    """Largest variable index in ``t``, or -1 for a ground term."""
    return max(variables(t), default=-1)


def depth(t: Term) -> int:
    return _fold(t, lambda v: 0, lambda u, ds: 1 + max(ds) if ds else 0)


def size(t: Term) -> int:
    return _fold(t, lambda v: 1, lambda u, ss: 1 + sum(ss))


def subterms(t: Term) -> Iterator[Term]:
    """Distinct subterms, parents before children."""
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        yield u
        if isinstance(u, App):
            stack.extend(reversed(u.args))


def check_term(t: Term, sig: Signature, arity: int | None = None) -> None:
    """Raise TermError unless ``t`` is well formed over ``sig``.

    With ``arity`` given, also require every variable index to be below it.
    """
    for s in subterms(t):
        if isinstance(s, Var):
            if arity is not None and s.index >= arity:
                raise TermError(f"variable x{s.index} outside context of arity {arity}")
        else:
            if not 0 <= s.op < len(sig):
                raise TermError(f"symbol index {s.op} not in signature")
            if len(s.args) != sig.arity(s.op):
                raise TermError(
                    f"{sig.symbol(s.op)} expects {sig.arity(s.op)} arguments, got {len(s.args)}")


def substitute(t: Term, bindings: Sequence[Term]) -> Term:
    """Simultaneously replace ``x_i`` by ``bindings[i]``."""
    if isinstance(t, Var):
        if t.index >= len(bindings):
            raise TermError(f"unbound variable x{t.index}")
        return bindings[t.index]
    return App(t.op, tuple(substitute(a, bindings) for a in t.args))


def format_term(t: Term, sig: Signature, compact: bool = False) -> str:
    sep = "," if compact else ", "
    if isinstance(t, Var):
        return f"x{t.index}"
    return f"{sig.symbol(t.op)}({sep.join(format_term(a, sig, compact) for a in t.args)})"


# --- lexer shared with the workbench file parser -----------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<num>[0-9]+)
  | (?P<punct><=|->|=>|[(){}\[\],:=/&;<])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'num' | 'punct' | 'eof'
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {src[pos]!r}", src, pos)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(src)))
    return out


class TokenStream:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> TermSyntaxError:
        tok = tok or self.peek
        return TermSyntaxError(message, self.src, tok.pos)

    def at(self, text: str) -> bool:
        tok = self.peek
        return tok.kind in ("punct", "ident") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.peek.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def ident(self) -> Token:
        if self.peek.kind != "ident":
            raise self.error(f"expected identifier, found {self.peek.text or 'end of input'!r}")
        return self.next()

    def number(self) -> int:
        if self.peek.kind != "num":
            raise self.error(f"expected number, found {self.peek.text or 'end of input'!r}")
        return int(self.next().text)

    def expect_eof(self):
        if self.peek.kind != "eof":
            raise self.error(f"unexpected trailing input {self.peek.text!r}")

    # term := 'x' DIGITS | IDENT '(' (term (',' term)*)? ')'
    def term(self, sig: Signature) -> Term:
        tok = self.ident()
        if _VAR_NAME.match(tok.text):
            return Var(int(tok.text[1:]))
        try:
            op = sig.index(tok.text)
        except TermError:
            raise self.error(f"unknown symbol {tok.text!r}", tok) from None
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term(sig))
            while self.accept(","):
                args.append(self.term(sig))
        self.expect(")")
        if len(args) != sig.arity(op):
            raise self.error(
                f"arity mismatch: {tok.text} expects {sig.arity(op)} arguments, got {len(args)}", tok)
        return App(op, tuple(args))

    def equation(self, sig: Signature) -> tuple[Term, Term]:
        lhs = self.term(sig)
        self.expect("=")
        return lhs, self.term(sig)


def parse_term(src: str, sig: Signature) -> Term:
    ts = TokenStream(src)
    t = ts.term(sig)
    ts.expect_eof()
    return t


def parse_equation(src: str, sig: Signature) -> tuple[Term, Term]:
    """Parse ``lhs = rhs``."""
    ts = TokenStream(src)
    eq = ts.equation(sig)
    ts.expect_eof()
    return eq
