"""Solid and dashed edges between elements of F2, and the rules composing them.

An edge s → r (or s ⇢ r) is a ternary witness w with

    w(x, x, z) ≈ ŝ        (tail)
    w(x, z, z) ≈ r̂        (head)
    w(x, y, x) ≈ x        (solid edges only)

Edges are always stored forward, tail to head.  A left arrow at position i
of a path is the forward edge s_{i+1} → s_i.

Two calculi share one implementation.  The symbolic calculus attaches a proof
to each of the three defining equations, built from the hypothesis theory.
The model calculus works inside a finite algebra: points are compared by
their tables and every produced edge is re-checked on tables instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .proofs import ProofError, Step, Theory, cong_subst, inst, refl, trans
from .terms import X, Y, Z, Restriction, Term, dag_nodes, restrict, substitute, to_sexpr

SOLID = "SOLID"
DASHED = "DASHED"


class EdgeError(ValueError):
    pass


@dataclass(frozen=True)
class RuleInfo:
    rule: str
    requires_idempotence: bool
    summary: str


# Idempotence flags: a rule is marked False only when its construction here
# never touches an idempotence axiom.  VE uses s' ⇢ z̄, which needs ŝ'
# idempotent, so it is flagged even though weaker readings exist.
RULES = {r.rule: r for r in [
    RuleInfo("AXIOM", False, "step edge read off a hypothesis term"),
    RuleInfo("REFL", True, "s → s, witness ŝ(x, z)"),
    RuleInfo("REFL_DASHED", False, "s ⇢ s, witness ŝ(x, z)"),
    RuleInfo("XS", True, "x̄ ⇢ s, witness ŝ(x, y)"),
    RuleInfo("SZ", True, "s ⇢ z̄, witness ŝ(y, z)"),
    RuleInfo("XZ", False, "x̄ ⇢ z̄, witness y"),
    RuleInfo("COMP", True, "t̄(s_i) → t̄(r_i) for an idempotent t"),
    RuleInfo("COMP_PARTIAL", False, "t̄(s_i) → t̄(r_i) given an absorption identity of t"),
    RuleInfo("COMP_DASHED", False, "t̄(s_i) ⇢ t̄(r_i)"),
    RuleInfo("VA", False, "s̄(s', s'') ⇢ r̄(r', r'')"),
    RuleInfo("VB", False, "s̄(s', s'') → r̄(r', r'')"),
    RuleInfo("VC", False, "reversed frame, dashed"),
    RuleInfo("VD", False, "reversed frame, solid"),
    RuleInfo("VE", True, "s̄(s', z̄) ⇢ r̄(r', z̄) and s̄(x̄, s') ⇢ r̄(x̄, r')"),
    RuleInfo("VF", True, "solid version of VE"),
    RuleInfo("VG", True, "s^(p] ⇢ r^(p]"),
    RuleInfo("VH1", True, "s̄(s', s'') → z̄"),
    RuleInfo("VH2", True, "z̄ → s̄(s', s'')"),
    RuleInfo("VH3", True, "z̄ ⇢ s̄(s', s'')"),
    RuleInfo("VJ1", True, "x̄ → s̄(s'', s')"),
    RuleInfo("VJ2", True, "s̄(s'', s') → x̄"),
    RuleInfo("VK1", True, "s ⇢ r̄(s', s'')"),
    RuleInfo("VK2", True, "r̄(s', s'') ⇢ s"),
    RuleInfo("REV", False, "view s → r as r ← s"),
    RuleInfo("MODEL", False, "edge read off a free algebra element"),
]}


@dataclass(frozen=True, eq=False)
class Edge:
    tail: Term
    head: Term
    kind: str
    witness: Term
    rule: str = "AXIOM"
    p_tail: Step | None = None
    p_head: Step | None = None
    p_solid: Step | None = None
    model_checked: bool = False
    flipped: bool = False  # display only: shown as head ← tail

    @property
    def solid(self) -> bool:
        return self.kind == SOLID

    @property
    def src(self) -> Term:
        return self.head if self.flipped else self.tail

    @property
    def dst(self) -> Term:
        return self.tail if self.flipped else self.head

    def dashed(self) -> "Edge":
        if not self.solid:
            return self
        return replace(self, kind=DASHED, p_solid=None)

    def reverse(self) -> "Edge":
        """The same edge read right to left; applying twice is the identity."""
        return replace(self, flipped=not self.flipped)

    def describe(self, limit: int = 200) -> str:
        arrow = {(SOLID, False): "→", (DASHED, False): "⇢",
                 (SOLID, True): "←", (DASHED, True): "⇠"}[self.kind, self.flipped]
        a, b = (self.head, self.tail) if self.flipped else (self.tail, self.head)
        return (f"{to_sexpr(a, limit)} {arrow} {to_sexpr(b, limit)}"
                f"  [{self.rule}] w={to_sexpr(self.witness, limit)}")


def tail_of(w: Term) -> Term:
    return restrict(w, Restriction.XXZ)


def head_of(w: Term) -> Term:
    return restrict(w, Restriction.XZZ)


def solid_of(w: Term) -> Term:
    return restrict(w, Restriction.XYX)


def compose_point(s: Term, first: Term, second: Term) -> Term:
    return substitute(s, {"x": first, "z": second})


def power(s: Term, p: int) -> Term:
    """s^(0] = s and s^(p+1] = s̄(x̄, s^(p]), as binary terms."""
    if p < 0:
        raise EdgeError("power needs p >= 0")
    out = s
    for _ in range(p):
        out = compose_point(s, X, out)
    return out


class Calculus:
    """Symbolic calculus: every edge carries proofs of its defining equations."""

    symbolic = True

    def __init__(self, theory: Theory):
        self.theory = theory

    # -- plumbing -------------------------------------------------------

    def same(self, a: Term, b: Term) -> bool:
        return a is b

    def _need(self, a: Term, b: Term, what: str):
        if not self.same(a, b):
            raise EdgeError(f"premise mismatch at {what}: "
                            f"{to_sexpr(a, 120)} vs {to_sexpr(b, 120)}")

    def idem(self, t: Term) -> Step:
        return self.theory.idem(t)

    def make(self, tail, head, witness, solid, rule, p_tail, p_head, p_solid) -> Edge:
        if p_tail.lhs is not tail_of(witness) or p_tail.rhs is not tail:
            raise ProofError(f"{rule}: tail proof does not fit")
        if p_head.lhs is not head_of(witness) or p_head.rhs is not head:
            raise ProofError(f"{rule}: head proof does not fit")
        if solid and (p_solid is None or p_solid.lhs is not solid_of(witness)
                      or p_solid.rhs is not X):
            raise ProofError(f"{rule}: solid proof does not fit")
        return Edge(tail, head, SOLID if solid else DASHED, witness, rule,
                    p_tail, p_head, p_solid if solid else None)

    def rebase(self, e: Edge, tail_eq: Step | None = None, head_eq: Step | None = None,
               rule: str | None = None) -> Edge:
        """Move the endpoints along proofs old ≈ new."""
        p_tail, p_head = e.p_tail, e.p_head
        tail, head = e.tail, e.head
        if tail_eq is not None:
            p_tail, tail = trans(p_tail, tail_eq), tail_eq.rhs
        if head_eq is not None:
            p_head, head = trans(p_head, head_eq), head_eq.rhs
        return replace(e, tail=tail, head=head, p_tail=p_tail, p_head=p_head,
                       rule=rule or e.rule)

    # -- basic edges ----------------------------------------------------

    def axiom_edge(self, witness, tail, head, solid, p_tail, p_head, p_solid=None) -> Edge:
        return self.make(tail, head, witness, solid, "AXIOM", p_tail, p_head, p_solid)

    def refl(self, s: Term, solid: bool = True) -> Edge:
        p_solid = self.idem(s) if solid else None
        return self.make(s, s, s, solid, "REFL" if solid else "REFL_DASHED",
                         refl(s), refl(s), p_solid)

    def from_x(self, s: Term) -> Edge:
        """x̄ ⇢ s, witness ŝ(x, y); the projection y when s is z̄."""
        w = substitute(s, {"z": Y})
        rule = "XZ" if s is Z else "XS"
        return self.make(X, s, w, False, rule, self.idem(s), refl(s), None)

    def to_z(self, s: Term) -> Edge:
        """s ⇢ z̄, witness ŝ(y, z)."""
        w = substitute(s, {"x": Y})
        rule = "XZ" if s is X else "SZ"
        return self.make(s, Z, w, False, rule, refl(s), inst(self.idem(s), {"x": Z}), None)

    # -- composition ----------------------------------------------------

    def compose(self, t: Term, edges: Mapping[str, Edge], solid_vars=None,
                absorb: Step | None = None) -> Edge:
        """t̄(tails) → t̄(heads), witness t with each variable filled by a witness.

        Without ``solid_vars`` the result is solid iff every edge is solid
        (using idempotence of t).  With ``solid_vars`` = I and ``absorb``
        proving t[v := x for v in I] ≈ x, only the edges in I need be solid.
        """
        names = sorted({n.head for n in dag_nodes(t) if n.is_var})
        missing = [v for v in names if v not in edges]
        if missing:
            raise EdgeError(f"no edge for variable(s) {missing}")
        W = substitute(t, {v: edges[v].witness for v in names})
        tail = substitute(t, {v: edges[v].tail for v in names})
        head = substitute(t, {v: edges[v].head for v in names})
        p_tail = cong_subst(t, {v: edges[v].p_tail for v in names}) if self.symbolic else None
        p_head = cong_subst(t, {v: edges[v].p_head for v in names}) if self.symbolic else None
        if solid_vars is None:
            solid = all(edges[v].solid for v in names)
            I = set(names) if solid else set()
            rule = "COMP" if solid else "COMP_DASHED"
        else:
            I = set(solid_vars)
            bad = [v for v in I if v in edges and not edges[v].solid]
            if bad:
                raise EdgeError(f"edges for {bad} must be solid")
            solid = True
            rule = "COMP_PARTIAL"
        p_solid = None
        if solid and self.symbolic:
            rest = {v: solid_of(edges[v].witness) for v in names if v not in I}
            step = cong_subst(t, {**{v: edges[v].p_solid for v in names if v in I},
                                  **{v: refl(w) for v, w in rest.items()}})
            if absorb is None:
                if rest:
                    raise EdgeError("absorption proof required for partial solidity")
                absorb = self.idem(t)
            p_solid = trans(step, inst(absorb, rest))
        return self.make(tail, head, W, solid, rule, p_tail, p_head, p_solid)

    def frame(self, fr: Edge, e1: Edge, e2: Edge, e3: Edge, reverse: bool = False) -> Edge:
        """Items (a)-(d): a frame edge with three premises.

        Forward (VA/VB): frame s → r, e1: s' → r', e2: s' ⇢ r'', e3: s'' → r''
        give s̄(s', s'') → r̄(r', r'').  Reversed (VC/VD): frame r → s,
        e1: s' → r', e2: s'' ⇢ r', e3: s'' → r'' give the same conclusion.
        The witness is the frame witness applied to (w1, w2, w3).
        """
        a1, a2, b1, b2 = e1.tail, e1.head, e3.tail, e3.head
        if reverse:
            self._need(e2.tail, b1, "middle premise tail")
            self._need(e2.head, a2, "middle premise head")
            s_hat, r_hat = fr.head, fr.tail
        else:
            self._need(e2.tail, a1, "middle premise tail")
            self._need(e2.head, b2, "middle premise head")
            s_hat, r_hat = fr.tail, fr.head
        T = fr.witness
        W = substitute(T, {"x": e1.witness, "y": e2.witness, "z": e3.witness})
        tail = compose_point(s_hat, a1, b1)
        head = compose_point(r_hat, a2, b2)
        solid = fr.solid and e1.solid and e3.solid
        rule = ("VD" if solid else "VC") if reverse else ("VB" if solid else "VA")
        if not self.symbolic:
            return self.make(tail, head, W, solid, rule, None, None, None)
        subs_t = {"x": a1, "z": b1}
        subs_h = {"x": a2, "z": b2}
        left = cong_subst(T, {"x": e1.p_tail, "y": e2.p_tail, "z": e3.p_tail})
        right = cong_subst(T, {"x": e1.p_head, "y": e2.p_head, "z": e3.p_head})
        if reverse:
            p_tail = trans(left, inst(fr.p_head, subs_t))
            p_head = trans(right, inst(fr.p_tail, subs_h))
        else:
            p_tail = trans(left, inst(fr.p_tail, subs_t))
            p_head = trans(right, inst(fr.p_head, subs_h))
        p_solid = None
        if solid:
            mid = solid_of(e2.witness)
            step = cong_subst(T, {"x": e1.p_solid, "y": refl(mid), "z": e3.p_solid})
            p_solid = trans(step, inst(fr.p_solid, {"y": mid}))
        return self.make(tail, head, W, solid, rule, p_tail, p_head, p_solid)

    # -- derived rules ----------------------------------------------------

    def ve(self, fr: Edge, inner: Edge, second: bool = False) -> Edge:
        """s̄(s', z̄) ⇢ r̄(r', z̄), or s̄(x̄, s') ⇢ r̄(x̄, r') with ``second``.

        Solid (rule VF) when both the frame and the inner edge are solid.
        """
        if second:
            e = self.frame(fr, self.refl(X), self.from_x(inner.head), inner)
        else:
            e = self.frame(fr, inner, self.to_z(inner.tail), self.refl(Z))
        return replace(e, rule="VF" if e.solid else "VE")

    def vg(self, fr: Edge, p: int) -> Edge:
        """s^(p] ⇢ r^(p] (solid if the frame is), iterating the second form of VE."""
        if p < 0:
            raise EdgeError("power needs p >= 0")
        cur = fr
        for _ in range(p):
            cur = self.ve(fr, cur, second=True)
        return replace(cur, rule="VG")

    def vh1(self, fr: Edge, s1: Term, e2: Edge) -> Edge:
        """s → z̄ and s'' → z̄ give s̄(s', s'') → z̄."""
        self._need(fr.head, Z, "frame head")
        self._need(e2.head, Z, "second premise head")
        e = self.frame(fr, self.refl(s1), self.to_z(s1), e2)
        return replace(e, rule="VH1")

    def vh2(self, fr: Edge, s1: Term, mid: Edge, e2: Edge) -> Edge:
        """z̄ → s, z̄ → s'' and s' ⇢ s'' give z̄ → s̄(s', s''); dashed gives VH3."""
        self._need(fr.tail, Z, "frame tail")
        self._need(e2.tail, Z, "third premise tail")
        self._need(mid.tail, s1, "middle premise tail")
        e = self.frame(fr, self.refl(s1), mid, e2)
        return replace(e, rule="VH2" if e.solid else "VH3")

    def vj1(self, fr: Edge, e1: Edge, s1: Term) -> Edge:
        """x̄ → s and x̄ → s'' give x̄ → s̄(s'', s')."""
        self._need(fr.tail, X, "frame tail")
        self._need(e1.tail, X, "first premise tail")
        e = self.frame(fr, e1, self.from_x(s1), self.refl(s1))
        return replace(e, rule="VJ1")

    def vj2(self, fr: Edge, e1: Edge, mid: Edge) -> Edge:
        """s → x̄, s'' → x̄ and s'' ⇢ s' give s̄(s'', s') → x̄."""
        self._need(fr.head, X, "frame head")
        self._need(e1.head, X, "first premise head")
        e = self.frame(fr, e1, mid, self.refl(mid.head))
        return replace(e, rule="VJ2")

    def vk1(self, r: Term, e1: Edge, e2: Edge) -> Edge:
        """s ⇢ s' and s ⇢ s'' give s ⇢ r̄(s', s'')."""
        self._need(e1.tail, e2.tail, "common tail")
        e = self.compose(r, {"x": e1.dashed(), "z": e2.dashed()})
        s = e1.tail
        if not self.symbolic:
            return replace(e, tail=s, rule="VK1")
        eq = inst(self.idem(r), {"x": s})  # r̂(s, s) ≈ s
        return self.rebase(e, tail_eq=eq, rule="VK1")

    def vk2(self, r: Term, e1: Edge, e2: Edge) -> Edge:
        """s' ⇢ s and s'' ⇢ s give r̄(s', s'') ⇢ s."""
        self._need(e1.head, e2.head, "common head")
        e = self.compose(r, {"x": e1.dashed(), "z": e2.dashed()})
        s = e1.head
        if not self.symbolic:
            return replace(e, head=s, rule="VK2")
        eq = inst(self.idem(r), {"x": s})
        return self.rebase(e, head_eq=eq, rule="VK2")


class ModelCalculus(Calculus):
    """The same rules inside a finite algebra, verified on operation tables.

    Points are binary terms compared by their tables over A^2.  When the free
    algebras are supplied, points and witnesses are replaced by the stored
    shortest generating terms, which keeps everything small.
    """

    symbolic = False

    def __init__(self, algebra, F2=None, F3=None):
        self.algebra = algebra
        self.F2 = F2
        self.F3 = F3
        self.theory = None

    def tab2(self, t: Term) -> tuple:
        return self.algebra.tabulate(t, 2)

    def tab3(self, t: Term) -> tuple:
        return self.algebra.tabulate(t, 3)

    def same(self, a: Term, b: Term) -> bool:
        return a is b or self.tab2(a) == self.tab2(b)

    def canon(self, s: Term) -> Term:
        if self.F2 is not None:
            k = self.F2.index_of(self.tab2(s))
            if k is not None:
                return self.F2.elements[k].witness
        return s

    def idem(self, t: Term):
        return None

    def make(self, tail, head, witness, solid, rule, p_tail, p_head, p_solid) -> Edge:
        if self.F3 is not None:
            k = self.F3.index_of(self.tab3(witness))
            if k is not None:
                witness = self.F3.elements[k].witness
        if self.tab2(tail_of(witness)) != self.tab2(tail):
            raise EdgeError(f"{rule}: tail table mismatch")
        if self.tab2(head_of(witness)) != self.tab2(head):
            raise EdgeError(f"{rule}: head table mismatch")
        if solid and self.tab3(solid_of(witness)) != self.tab3(X):
            raise EdgeError(f"{rule}: witness is not solid")
        return Edge(self.canon(tail), self.canon(head), SOLID if solid else DASHED,
                    witness, rule, model_checked=True)

    def rebase(self, e: Edge, tail_eq=None, head_eq=None, rule=None) -> Edge:
        return replace(e, rule=rule or e.rule)

    def point(self, s: Term) -> Term:
        return self.canon(s)

    def refl(self, s: Term, solid: bool = True) -> Edge:
        return self.make(s, s, s, solid, "REFL" if solid else "REFL_DASHED", None, None, None)

    def from_x(self, s: Term) -> Edge:
        return self.make(X, s, substitute(s, {"z": Y}), False,
                         "XZ" if s is Z else "XS", None, None, None)

    def to_z(self, s: Term) -> Edge:
        return self.make(s, Z, substitute(s, {"x": Y}), False,
                         "XZ" if s is X else "SZ", None, None, None)

    def check(self, e: Edge) -> bool:
        try:
            self.make(e.tail, e.head, e.witness, e.solid, e.rule, None, None, None)
        except EdgeError:
            return False
        return True


def model_edges(F2, F3) -> tuple[list[Edge], bool]:
    """Every edge given by an element u of F3: u(x,x,z) to u(x,z,z).

    Returns the edges (ordered by F3 index) and a flag telling whether the
    enumeration is exhaustive; with an incomplete F3 edges may be missing,
    but no listed edge is wrong.
    """
    if F2.algebra is not F3.algebra:
        raise EdgeError("free algebras over different algebras")
    alg = F2.algebra
    out = []
    proj_x = alg.tabulate(X, 3)
    for u in F3.elements:
        w = u.witness
        tail = alg.tabulate(tail_of(w), 2)
        head = alg.tabulate(head_of(w), 2)
        i, j = F2.index_of(tail), F2.index_of(head)
        if i is None or j is None:
            continue  # only possible when F2 is incomplete
        solid = alg.tabulate(solid_of(w), 3) == proj_x
        out.append(Edge(F2.elements[i].witness, F2.elements[j].witness,
                        SOLID if solid else DASHED, w, "MODEL", model_checked=True))
    return out, F2.complete and F3.complete


def edge_set(edges, F2) -> set:
    """Index triples (tail, head, kind) for comparing edge collections."""
    alg = F2.algebra
    out = set()
    for e in edges:
        out.add((F2.index_of(alg.tabulate(e.tail, 2)), F2.index_of(alg.tabulate(e.head, 2)), e.kind))
    return out
