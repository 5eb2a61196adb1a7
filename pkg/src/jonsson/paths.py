"""Witnessed paths x̄ = s_1, ..., s_n = z̄ and their conversion to and from terms."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .catalog import Arrow, PatternPath, _toward, catalog_path, pattern_identities
from .edges import Calculus, Edge, head_of, tail_of
from .proofs import Theory, refl, sym
from .terms import X, Z, Term, restrict, to_sexpr


class PathError(ValueError):
    pass


@dataclass
class WitnessedPath:
    """Points are 1-indexed in the interface: ``point(1)`` is x̄.

    ``steps[i-1]`` is the forward edge for position i: s_i → s_{i+1} for a
    right arrow, s_{i+1} → s_i for the left kinds.  ``extra`` holds dashed
    edges s_i ⇢ s_j keyed by (i, j).
    """

    pattern: PatternPath
    points: list
    steps: list
    extra: dict = field(default_factory=dict)
    caveat: str = ""

    @property
    def n(self) -> int:
        return len(self.points)

    def point(self, i: int) -> Term:
        return self.points[i - 1]

    def step(self, i: int) -> Edge:
        return self.steps[i - 1]

    def arrow(self, i: int) -> Arrow:
        return self.pattern.arrows[i - 1]

    def step_ends(self, i: int) -> tuple[int, int]:
        """Indices (tail, head) of the forward edge at position i."""
        return (i, i + 1) if self.arrow(i) is Arrow.RIGHT else (i + 1, i)

    def terms(self) -> list[Term]:
        return [e.witness for e in self.steps]

    def check_shape(self, calc: Calculus) -> None:
        if len(self.steps) != self.n - 1 or self.pattern.n != self.n:
            raise PathError("step count does not match the pattern")
        if not calc.same(self.points[0], X) or not calc.same(self.points[-1], Z):
            raise PathError("path must run from x̄ to z̄")
        for i in range(1, self.n):
            e = self.step(i)
            a, b = self.step_ends(i)
            if not (calc.same(e.tail, self.point(a)) and calc.same(e.head, self.point(b))):
                raise PathError(f"step {i} does not connect its points")
            if self.arrow(i).solid and not e.solid:
                raise PathError(f"step {i} must be solid")
        for (i, j), e in self.extra.items():
            if not (calc.same(e.tail, self.point(i)) and calc.same(e.head, self.point(j))):
                raise PathError(f"extra edge ({i},{j}) does not connect its points")


def terms_to_path(pattern: PatternPath, terms: list[Term], calc: Calculus) -> WitnessedPath:
    """Read the points and step edges off hypothesis terms t_1..t_{n-1}.

    Point s_{i+1} is t_i restricted towards it; the step proofs are the
    pattern's link and solidity identities (symbolically, the terms are
    taken to be the hypothesis symbols themselves or any terms over them
    whose identities are the theory's axioms).
    """
    n = pattern.n
    if len(terms) != n - 1:
        raise PathError(f"pattern needs {n - 1} terms, got {len(terms)}")
    points = [X]
    for i in range(1, n - 1):
        points.append(restrict(terms[i - 1], _toward(pattern.arrows[i - 1], True)))
    points.append(Z)
    steps = []
    for i, (arrow, t) in enumerate(zip(pattern.arrows, terms), start=1):
        near = points[i - 1]  # s_i
        far = points[i]  # s_{i+1}
        tail, head = (near, far) if arrow is Arrow.RIGHT else (far, near)
        solid = arrow.solid
        if not calc.symbolic:
            steps.append(calc.make(tail, head, t, solid, "AXIOM", None, None, None))
            continue
        th = calc.theory
        p_near = sym(th.axiom(f"link:{i}"))  # t_i restricted towards s_i ≈ s_i
        p_far = refl(far) if i < n - 1 else th.axiom(f"link:{n}")
        if arrow is Arrow.RIGHT:
            p_tail, p_head = p_near, p_far
        else:
            p_tail, p_head = p_far, p_near
        p_solid = sym(th.axiom(f"solid:{i}")) if solid else None
        steps.append(calc.axiom_edge(t, tail, head, solid, p_tail, p_head, p_solid))
    return WitnessedPath(pattern, points, steps)


def path_to_terms(w: WitnessedPath) -> list[Term]:
    return w.terms()


def symbolic_theory(pattern: PatternPath, idempotent: bool = True) -> Theory:
    """Hypotheses over the symbols t1..t_{n-1} for a pattern."""
    ids = pattern_identities(pattern)
    return Theory(ids, [(f"t{i}", 3) for i in range(1, pattern.n)], idempotent)


def symbolic_path(pattern: PatternPath, idempotent: bool = True):
    from .terms import Y, app
    th = symbolic_theory(pattern, idempotent)
    calc = Calculus(th)
    terms = [app(f"t{i}", X, Y, Z) for i in range(1, pattern.n)]
    return terms_to_path(pattern, terms, calc), calc


def canonicalize(w: WitnessedPath, calc: Calculus) -> WitnessedPath:
    """Rebind s_i (2 ≤ i ≤ n-1) to the restriction of step i-1 towards it.

    Every edge touching s_i is moved along the proof old ≈ new, so all
    certificates stay valid.
    """
    points = list(w.points)
    steps = list(w.steps)
    extra = dict(w.extra)
    for i in range(2, w.n):
        e = steps[i - 2]
        a, b = w.step_ends(i - 1)
        at_head = b == i
        new = head_of(e.witness) if at_head else tail_of(e.witness)
        old = points[i - 1]
        if new is old:
            continue
        if not calc.symbolic:
            new = calc.canon(new)
            if new is old:
                continue
        points[i - 1] = new
        if calc.symbolic:
            # proof old ≈ new, read backwards off the step's endpoint proof
            fwd = sym(e.p_head if at_head else e.p_tail)
        else:
            fwd = None

        def move(edge, ends):
            t_i, h_i = ends
            if t_i == i:
                edge = calc.rebase(edge, tail_eq=fwd) if calc.symbolic else replace(edge, tail=new)
            if h_i == i:
                edge = calc.rebase(edge, head_eq=fwd) if calc.symbolic else replace(edge, head=new)
            return edge

        for k in range(1, w.n):
            if k == i - 1 and calc.symbolic:
                own = steps[k - 1]
                steps[k - 1] = (replace(own, head=new, p_head=refl(new)) if at_head
                                else replace(own, tail=new, p_tail=refl(new)))
                continue
            steps[k - 1] = move(steps[k - 1], w.step_ends(k))
        for key in list(extra):
            extra[key] = move(extra[key], key)
    return WitnessedPath(w.pattern, points, steps, extra, w.caveat)


# -- DOT ----------------------------------------------------------------------

def _label(t: Term, limit: int = 60) -> str:
    return to_sexpr(t, limit).replace('"', '\\"')


def to_dot(w: WitnessedPath, name: str = "path", limit: int = 60) -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i, p in enumerate(w.points, start=1):
        label = "x̄" if i == 1 else "z̄" if i == w.n else f"s{i}: {_label(p, limit)}"
        lines.append(f'  s{i} [label="{label}"];')
    for i in range(1, w.n):
        e = w.step(i)
        a, b = w.step_ends(i)
        style = "solid" if e.solid else "dashed"
        lines.append(f'  s{a} -> s{b} [style={style}, label="t{i}"];')
    for (i, j), e in sorted(w.extra.items()):
        if i == j:
            continue
        lines.append(f"  s{i} -> s{j} [style=dashed, constraint=false, color=gray];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- model search ---------------------------------------------------------------

def realize_in_model(pattern: PatternPath, edges: list[Edge], F2, complete: bool = True):
    """Find s_2..s_{n-1} in F2 realizing the pattern with the given edges.

    Vertices are tried by ascending F2 index, depth first over positions;
    a backward reachability table prunes dead branches, so the first
    solution in that order is returned.  Returns None when absent.
    """
    alg = F2.algebra
    index = {}
    by_pair: dict = {}
    for e in edges:
        a = F2.index_of(alg.tabulate(e.tail, 2))
        b = F2.index_of(alg.tabulate(e.head, 2))
        index[id(e)] = (a, b)
        key = (a, b)
        slot = by_pair.setdefault(key, [None, None])
        if e.solid and slot[0] is None:
            slot[0] = e
        if slot[1] is None:
            slot[1] = e
    x_idx = F2.index_of(alg.tabulate(X, 2))
    z_idx = F2.index_of(alg.tabulate(Z, 2))
    N = len(F2)
    n = pattern.n

    def edge_for(i, u, v):
        arrow = pattern.arrows[i - 1]
        key = (u, v) if arrow is Arrow.RIGHT else (v, u)
        slot = by_pair.get(key)
        if slot is None:
            return None
        return slot[0] if arrow.solid else slot[1]

    # ok[i] = set of vertices usable as s_i with a continuation to z̄
    ok = [None] * (n + 1)
    ok[n] = {z_idx}
    for i in range(n - 1, 0, -1):
        cands = range(N) if i > 1 else [x_idx]
        ok[i] = {u for u in cands if any(edge_for(i, u, v) is not None for v in ok[i + 1])}
    if x_idx not in ok[1]:
        return None
    seq = [x_idx]
    for i in range(1, n):
        u = seq[-1]
        v = min(v for v in ok[i + 1] if edge_for(i, u, v) is not None)
        seq.append(v)
    points = [F2.elements[k].witness for k in seq]
    steps = [edge_for(i, seq[i - 1], seq[i]) for i in range(1, n)]
    caveat = "" if complete else "free algebra enumeration incomplete: absence is not conclusive"
    return WitnessedPath(pattern, points, steps, {}, caveat)


def minimal_n(edges, F2, condition: str, bound: int = 8, complete: bool = True):
    """Smallest n ≤ bound for which the condition's path is realized."""
    from .catalog import CatalogError
    for n in range(2, bound + 1):
        try:
            pattern = catalog_path(condition, n)
        except CatalogError:
            continue
        found = realize_in_model(pattern, edges, F2, complete)
        if found is not None:
            return n, found
        if condition == "pixley":
            break
    return None, None
