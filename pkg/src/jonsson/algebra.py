"""Finite algebras given by operation tables, and their free algebras F2, F3.

F_m of the variety generated by A is realized as the subalgebra of A^(A^m)
generated by the m projections.  Elements are stored as flat tables indexed
by the base-k value of the input tuple, e.g. for m = 2 the entry for
(x, z) = (a, b) sits at position a*k + b.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .terms import VARIABLES, Identity, Signature, Term, TermError, dag_nodes, to_sexpr

FREE_VARIABLES = {2: ("x", "z"), 3: ("x", "y", "z")}
DEFAULT_CAPS = {2: 100_000, 3: 1_000_000}


class AlgebraError(ValueError):
    pass


@dataclass
class Operation:
    name: str
    arity: int
    table: np.ndarray  # flat, length k**arity

    def __call__(self, *args: int) -> int:
        idx = 0
        k = round(len(self.table) ** (1 / self.arity)) if self.arity else 1
        for a in args:
            idx = idx * k + a
        return int(self.table[idx])


@dataclass
class FiniteAlgebra:
    name: str
    size: int
    ops: dict[str, Operation] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("algebra must be non-empty")
        for op in self.ops.values():
            if len(op.table) != self.size ** op.arity:
                raise AlgebraError(f"table of {op.name} has wrong length")
            if len(op.table) and (op.table.min() < 0 or op.table.max() >= self.size):
                raise AlgebraError(f"table of {op.name} leaves the universe")
        self._eval_cache: dict = {}

    @classmethod
    def from_tables(cls, name: str, size: int, **tables) -> "FiniteAlgebra":
        ops = {}
        for op_name, (arity, table) in tables.items():
            ops[op_name] = Operation(op_name, arity, np.asarray(table, dtype=np.int64))
        return cls(name, size, ops)

    @classmethod
    def from_function(cls, name: str, size: int, **funcs) -> "FiniteAlgebra":
        ops = {}
        for op_name, (arity, fn) in funcs.items():
            table = [fn(*args) for args in itertools.product(range(size), repeat=arity)]
            ops[op_name] = Operation(op_name, arity, np.asarray(table, dtype=np.int64))
        return cls(name, size, ops)

    @property
    def signature(self) -> Signature:
        return Signature(tuple((op.name, op.arity) for op in self.ops.values()))

    # -- evaluation ------------------------------------------------------

    def grid(self, m: int) -> dict[str, np.ndarray]:
        """Coordinate arrays of A^m in row-major order, keyed by variable."""
        names = FREE_VARIABLES[m]
        cols = np.array(list(itertools.product(range(self.size), repeat=m)),
                        dtype=np.int64).reshape(-1, m)
        return {v: cols[:, i] for i, v in enumerate(names)}

    def apply(self, op: Operation, args: list[np.ndarray]) -> np.ndarray:
        idx = np.zeros_like(args[0]) if args else np.zeros(1, dtype=np.int64)
        for a in args:
            idx = idx * self.size + a
        return op.table[idx]

    def evaluate(self, t: Term, env: dict[str, np.ndarray]) -> np.ndarray:
        """Vectorized bottom-up evaluation; ``env`` maps variables to arrays."""
        length = len(next(iter(env.values())))
        memo: dict = {}
        for node in dag_nodes(t):
            if node.is_var:
                if node.head not in env:
                    raise AlgebraError(f"variable {node.head} not bound")
                memo[node] = env[node.head]
                continue
            op = self.ops.get(node.head)
            if op is None:
                raise AlgebraError(f"unknown symbol {node.head!r}")
            if op.arity != len(node.args):
                raise AlgebraError(f"arity mismatch for {node.head!r}")
            if op.arity == 0:
                memo[node] = np.full(length, op.table[0])
            else:
                memo[node] = self.apply(op, [memo[c] for c in node.args])
        return memo[t]

    def eval_term(self, t: Term, args: dict | tuple) -> int:
        if isinstance(args, tuple):
            args = dict(zip(VARIABLES, args))
        env = {v: np.array([a], dtype=np.int64) for v, a in args.items()}
        return int(self.evaluate(t, env)[0])

    def tabulate(self, t: Term, m: int) -> tuple:
        """Table of ``t`` as an m-ary operation (m = 2 uses x, z)."""
        key = (t, m)
        cached = self._eval_cache.get(key)
        if cached is None:
            env = self.grid(m)
            extra = set(v.head for v in dag_nodes(t) if v.is_var) - set(env)
            if extra:
                raise AlgebraError(f"variables {sorted(extra)} not available at arity {m}")
            cached = tuple(int(v) for v in self.evaluate(t, env))
            self._eval_cache[key] = cached
        return cached

    def check_idempotent(self):
        """Return (True, None) or (False, (op name, element))."""
        for op in self.ops.values():
            for a in range(self.size):
                if op.arity and op(*([a] * op.arity)) != a:
                    return False, (op.name, a)
                if op.arity == 0:
                    return False, (op.name, a)
        return True, None

    # -- text format ---------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"algebra {self.name}", f"size {self.size}"]
        for op in self.ops.values():
            lines.append(f"op {op.name} {op.arity}")
            lines.append(" ".join(str(int(v)) for v in op.table))
        return "\n".join(lines) + "\n"


def parse_algebra(text: str) -> FiniteAlgebra:
    name = None
    size = None
    ops: dict[str, Operation] = {}
    words: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        words.extend(line.split())
    i = 0

    def take(what):
        nonlocal i
        if i >= len(words):
            raise AlgebraError(f"unexpected end of file, expected {what}")
        i += 1
        return words[i - 1]

    while i < len(words):
        kw = take("keyword")
        if kw == "algebra":
            name = take("name")
        elif kw == "size":
            size = int(take("size"))
        elif kw == "op":
            if size is None:
                raise AlgebraError("'size' must precede 'op'")
            op_name = take("op name")
            arity = int(take("arity"))
            if op_name in VARIABLES:
                raise AlgebraError(f"operation may not be named {op_name!r}")
            count = size ** arity
            try:
                values = [int(take("table entry")) for _ in range(count)]
            except ValueError as exc:
                raise AlgebraError(f"bad table entry for {op_name}: {exc}") from None
            ops[op_name] = Operation(op_name, arity, np.asarray(values, dtype=np.int64))
        else:
            raise AlgebraError(f"unknown keyword {kw!r}")
    if name is None or size is None:
        raise AlgebraError("missing 'algebra' or 'size' line")
    return FiniteAlgebra(name, size, ops)


def load_algebra(path: str | Path) -> FiniteAlgebra:
    return parse_algebra(Path(path).read_text())


# -- free algebras -----------------------------------------------------------

@dataclass(frozen=True)
class CloneElement:
    arity: int
    table: tuple
    witness: Term
    index: int


@dataclass
class FreeAlgebra:
    algebra: FiniteAlgebra
    arity: int
    elements: list[CloneElement]
    complete: bool

    def __post_init__(self):
        self._by_table = {e.table: e.index for e in self.elements}

    def __len__(self):
        return len(self.elements)

    def index_of(self, table: tuple) -> int | None:
        return self._by_table.get(tuple(table))

    def projection(self, name: str) -> CloneElement:
        return self.elements[FREE_VARIABLES[self.arity].index(name)]


def generate_free(alg: FiniteAlgebra, m: int, cap: int | None = None) -> FreeAlgebra:
    """Close the projections of A^(A^m) under the operations, breadth first.

    Round r applies every operation (in name order) to every argument tuple
    (in lexicographic order of element indices) over the elements found so
    far; a table is recorded the first time it appears, so witnesses have
    minimal depth and the indexing is deterministic.
    """
    if m not in FREE_VARIABLES:
        raise AlgebraError("only m = 2 and m = 3 are supported")
    cap = DEFAULT_CAPS[m] if cap is None else cap
    if cap < m:
        raise AlgebraError("cap must be at least the number of generators")
    k = alg.size
    K = k ** m
    grid = alg.grid(m)
    state = _Closure(k, K, cap)
    for v in FREE_VARIABLES[m]:
        state.add_rows(grid[v][None, :], [Term(v)])
    ops = sorted(alg.ops.values(), key=lambda op: op.name)
    lo, hi = 0, len(state.elements)
    while lo < hi and state.complete:
        stacked = np.stack(state.tables[:hi])
        for op in ops:
            if op.arity == 0:
                if lo == 0:
                    state.add_rows(np.full((1, K), op.table[0]), [Term(op.name)])
            else:
                _apply_round(op, stacked, lo, hi, state, k)
            if not state.complete:
                break
        lo, hi = hi, len(state.elements)
    elements = [CloneElement(m, tuple(int(v) for v in t), w, i)
                for i, (t, w) in enumerate(zip(state.tables, state.elements))]
    return FreeAlgebra(alg, m, elements, state.complete)


class _Closure:
    """Discovered tables with vectorized membership tests on integer keys."""

    def __init__(self, k, K, cap):
        self.cap = cap
        self.tables: list[np.ndarray] = []
        self.elements: list[Term] = []
        self.complete = True
        self.small = K * np.log2(max(k, 2)) < 62
        self.powers = (k ** np.arange(K - 1, -1, -1, dtype=np.int64)) if self.small else None
        self.seen = np.zeros(0, dtype=np.int64)
        self.seen_bytes: set = set()

    def keys(self, rows: np.ndarray):
        if self.small:
            return rows.astype(np.int64) @ self.powers
        return [r.astype(np.int16).tobytes() for r in rows]

    def fresh(self, rows: np.ndarray) -> list[int]:
        """Positions of rows whose table is new, first occurrences only."""
        keys = self.keys(rows)
        if self.small:
            pos = np.searchsorted(self.seen, keys)
            known = (pos < len(self.seen)) & (self.seen[np.minimum(pos, len(self.seen) - 1)] == keys) \
                if len(self.seen) else np.zeros(len(keys), dtype=bool)
            cand = np.nonzero(~known)[0]
            if not len(cand):
                return []
            _, first = np.unique(keys[cand], return_index=True)
            return sorted(int(cand[i]) for i in first)
        out, local = [], set()
        for i, key in enumerate(keys):
            if key not in self.seen_bytes and key not in local:
                local.add(key)
                out.append(i)
        return out

    def add_rows(self, rows: np.ndarray, witnesses: list[Term]) -> None:
        idx = self.fresh(rows)
        self.commit(rows, idx, lambda i: witnesses[i])

    def commit(self, rows, idx, witness_of):
        if not idx:
            return
        room = self.cap - len(self.elements)
        if len(idx) > room:
            idx = idx[:room]
            self.complete = False
        keys = self.keys(rows[idx])
        for i in idx:
            self.tables.append(rows[i].copy())
            self.elements.append(witness_of(i))
        if self.small:
            self.seen = np.union1d(self.seen, keys)
        else:
            self.seen_bytes.update(keys)


def _apply_round(op, stacked, lo, hi, state: _Closure, k: int) -> None:
    a = op.arity
    if a == 1:
        rows = op.table[stacked[lo:hi]]
        idx = state.fresh(rows)
        state.commit(rows, idx, lambda i: Term(op.name, (state.elements[lo + i],)))
        return
    # all prefixes of length a-1, vectorized over the last argument
    for prefix in itertools.product(range(hi), repeat=a - 1):
        start = 0 if max(prefix) >= lo else lo
        idx = np.zeros(stacked.shape[1], dtype=np.int64)
        for i in prefix:
            idx = idx * k + stacked[i]
        rows = op.table[idx[None, :] * k + stacked[start:hi]]
        new = state.fresh(rows)
        if not new:
            continue
        pre = tuple(state.elements[c] for c in prefix)
        state.commit(rows, new, lambda j: Term(op.name, pre + (state.elements[start + j],)))
        if not state.complete:
            return


def verify_model(alg: FiniteAlgebra, binding: dict, identities: list[Identity]):
    """Check identities over all assignments of x, y, z in A.

    ``binding`` maps each symbol occurring in the identities either to the
    name of an operation of ``alg`` or to a term over its operations in the
    variables x, y, z (a derived ternary operation).  Returns (True, None) or
    (False, (identity, assignment)).
    """
    from .terms import substitute

    def expand(t: Term) -> Term:
        memo: dict = {}
        for node in dag_nodes(t):
            if node.is_var:
                memo[node] = node
                continue
            kids = tuple(memo[c] for c in node.args)
            target = binding.get(node.head)
            if target is None:
                if node.head in alg.ops:
                    memo[node] = Term(node.head, kids)
                    continue
                raise AlgebraError(f"unbound symbol {node.head!r}")
            if isinstance(target, str):
                memo[node] = Term(target, kids)
            else:
                memo[node] = substitute(target, dict(zip(VARIABLES, kids)))
        return memo[t]

    env = alg.grid(3)
    for ident in identities:
        lhs = alg.evaluate(expand(ident.lhs), env)
        rhs = alg.evaluate(expand(ident.rhs), env)
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            j = int(bad[0])
            assignment = {v: int(env[v][j]) for v in VARIABLES}
            return False, (ident, assignment)
    return True, None


def describe_table(table: tuple) -> str:
    return "".join(str(v) for v in table) if max(table, default=0) < 10 else " ".join(map(str, table))


__all__ = [
    "AlgebraError", "CloneElement", "FiniteAlgebra", "FreeAlgebra", "Operation",
    "generate_free", "load_algebra", "parse_algebra", "verify_model", "to_sexpr",
    "TermError",
]
