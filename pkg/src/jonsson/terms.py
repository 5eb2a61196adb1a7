"""Hash-consed terms over a finite signature with the variables x, y, z.

Every term is interned, so structurally equal terms are the same Python
object: equality is identity and hashing is O(1).  Witness terms produced by
the directification pipeline grow exponentially as trees but only linearly as
DAGs, which is what makes them tractable here.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

VARIABLES = ("x", "y", "z")


class TermError(ValueError):
    pass


class ParseError(TermError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Term:
    __slots__ = ("head", "args", "__weakref__")

    _table: dict = {}

    def __new__(cls, head: str, args: tuple = ()):
        key = (head, args)
        term = cls._table.get(key)
        if term is None:
            term = object.__new__(cls)
            term.head = head
            term.args = args
            cls._table[key] = term
        return term

    def __reduce__(self):
        return (Term, (self.head, self.args))

    @property
    def is_var(self) -> bool:
        return not self.args and self.head in VARIABLES

    def __repr__(self):
        return f"Term({to_sexpr(self, limit=200)!r})"

    def __str__(self):
        return to_sexpr(self)


X = Term("x")
Y = Term("y")
Z = Term("z")
VAR_TERMS = {"x": X, "y": Y, "z": Z}


def var(name: str) -> Term:
    if name not in VAR_TERMS:
        raise TermError(f"unknown variable {name!r}")
    return VAR_TERMS[name]


def app(symbol: str, *children: Term) -> Term:
    if symbol in VARIABLES:
        raise TermError(f"{symbol!r} is a variable, not a symbol")
    return Term(symbol, tuple(children))


@dataclass(frozen=True)
class Signature:
    symbols: tuple  # of (name, arity)

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise TermError("duplicate symbol names in signature")
        for name, arity in self.symbols:
            if arity < 0:
                raise TermError(f"negative arity for {name}")
            if name in VARIABLES or not name or "(" in name or ")" in name:
                raise TermError(f"invalid symbol name {name!r}")

    @classmethod
    def of(cls, **arities: int) -> "Signature":
        return cls(tuple(arities.items()))

    @classmethod
    def ternary(cls, names: Iterable[str]) -> "Signature":
        return cls(tuple((name, 3) for name in names))

    def arity(self, name: str) -> int:
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise TermError(f"unknown symbol {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(sym == name for sym, _ in self.symbols)

    def names(self) -> list[str]:
        return [name for name, _ in self.symbols]

    def merge(self, other: "Signature") -> "Signature":
        extra = tuple(s for s in other.symbols if s[0] not in self)
        return Signature(self.symbols + extra)


# -- printing and parsing ----------------------------------------------------

def tree_size(t: Term, _memo: dict | None = None) -> int:
    memo = {} if _memo is None else _memo
    stack = [t]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        pending = [c for c in node.args if c not in memo]
        if pending:
            stack.extend(pending)
            continue
        memo[node] = 1 + sum(memo[c] for c in node.args)
        stack.pop()
    return memo[t]


def dag_nodes(t: Term) -> list[Term]:
    """Distinct subterms of ``t`` in post-order (children before parents)."""
    seen = set()
    order = []
    stack = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        for child in reversed(node.args):
            if child not in seen:
                stack.append((child, False))
    return order


def to_sexpr(t: Term, limit: int | None = None) -> str:
    if limit is not None and tree_size(t) > limit:
        return f"<term of {tree_size(t)} nodes>"
    parts: list[str] = []

    def emit(node):
        if node.is_var:
            parts.append(node.head)
            return
        parts.append("(" + node.head)
        for child in node.args:
            parts.append(" ")
            emit(child)
        parts.append(")")

    emit(t)
    return "".join(parts)


def _tokenize(text: str):
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch, i
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], i
            i = j


def parse_term(text: str, sig: Signature | None = None,
               defs: Mapping[str, Term] | None = None) -> Term:
    """Parse an s-expression such as ``(t1 x (t2 x y z) z)``.

    ``defs`` maps names to previously defined terms over x, y, z; an
    application of a defined name is expanded by simultaneous substitution,
    so ``(t3s x y z)`` with ``t3s = (t3 (t1 x y z) y z)`` yields the expanded
    tree.  Without ``sig`` any undefined symbol is accepted.
    """
    defs = defs or {}
    tokens = list(_tokenize(text))
    pos = 0

    def parse() -> Term:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        tok, at = tokens[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        if tok != "(":
            if tok in VARIABLES:
                return VAR_TERMS[tok]
            raise ParseError(f"unknown variable {tok!r}", at)
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        name, name_at = tokens[pos]
        if name in "()":
            raise ParseError("expected symbol name", name_at)
        pos += 1
        children = []
        while True:
            if pos >= len(tokens):
                raise ParseError("missing ')'", len(text))
            if tokens[pos][0] == ")":
                pos += 1
                break
            children.append(parse())
        if name in defs:
            if len(children) != 3:
                raise ParseError(f"defined term {name!r} takes 3 arguments", name_at)
            return substitute(defs[name], dict(zip(VARIABLES, children)))
        if name in VARIABLES:
            raise ParseError(f"variable {name!r} used as a symbol", name_at)
        if sig is not None:
            if name not in sig:
                raise ParseError(f"unknown symbol {name!r}", name_at)
            if sig.arity(name) != len(children):
                raise ParseError(
                    f"arity mismatch for {name!r}: expected {sig.arity(name)}, "
                    f"got {len(children)}", name_at)
        return Term(name, tuple(children))

    result = parse()
    if pos != len(tokens):
        raise ParseError("trailing input", tokens[pos][1])
    return result


def check_term(t: Term, sig: Signature) -> None:
    for node in dag_nodes(t):
        if node.is_var:
            continue
        if sig.arity(node.head) != len(node.args):
            raise TermError(f"arity mismatch for {node.head!r}")


# -- substitution -------------------------------------------------------------

def substitute(t: Term, mapping: Mapping[str, Term], memo: dict | None = None) -> Term:
    """Simultaneous substitution of variables; unmapped variables stay put."""
    if memo is None:
        memo = {}
    for node in dag_nodes(t):
        if node in memo:
            continue
        if node.is_var:
            memo[node] = mapping.get(node.head, node)
        elif not node.args:
            memo[node] = node
        else:
            memo[node] = Term(node.head, tuple(memo[c] for c in node.args))
    return memo[t]


def variables(t: Term) -> set[str]:
    return {n.head for n in dag_nodes(t) if n.is_var}


def symbols(t: Term) -> set[str]:
    return {n.head for n in dag_nodes(t) if not n.is_var}


class Restriction(Enum):
    XXZ = (("y", "x"),)
    XZZ = (("y", "z"),)
    XYX = (("z", "x"),)
    XX = (("y", "x"), ("z", "x"))

    @property
    def mapping(self) -> dict:
        return {v: VAR_TERMS[w] for v, w in self.value}


def restrict(t: Term, pattern: Restriction) -> Term:
    if pattern is Restriction.XX:
        if "y" in variables(t):
            raise TermError("XX restriction applies to binary terms over x, z")
    return substitute(t, pattern.mapping)


def binary(t: Term) -> bool:
    return variables(t) <= {"x", "z"}


def compose_binary(s: Term, first: Term, second: Term) -> Term:
    """The element s̄(first, second) of F2: substitute x, z in a binary term."""
    return substitute(s, {"x": first, "z": second})


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    name: str = ""

    def __str__(self):
        label = f"[{self.name}] " if self.name else ""
        return f"{label}{to_sexpr(self.lhs)} = {to_sexpr(self.rhs)}"
