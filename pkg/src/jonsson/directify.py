"""From Jónsson terms to directed Jónsson terms, and the alvin and Gumm variants.

The pipeline on a path x̄ → s2 ← s3 → s4 ← ... z̄ is

1. ``strengthen_star``: a descending induction on even h that rebuilds the
   points as s*_{j} = s̄_j(s*_{a(j)}, z̄) until the distant dashed edges
   s_i ⇢ s_j (i odd, or j ≥ i + 2) all exist;
2. ``flip_step`` at h = 2 (the bootstrap) and then at h = 4, 6, ...: every
   point becomes s*_i = s̄_i(s_i, s_{h+1}) for i ≤ h and s̄_i(s_h, s_i)
   otherwise, which turns the arrow at position h to the right.

Each step edge and each distant edge of the new path comes from one frame
rule applied to the corresponding old edge, so all certificates carry over.
After every pass the points are rebound to the restriction of the step term
that reaches them, which is the convention that reproduces the hand-worked
n = 6 terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .catalog import Arrow, PatternPath, catalog_path, pattern_identities
from .edges import Calculus, Edge, compose_point
from .paths import WitnessedPath, canonicalize, terms_to_path
from .proofs import Theory, TermTable, manifest, serialize_steps
from .terms import X, Z, Term, dag_nodes, to_sexpr

log = logging.getLogger(__name__)

R, L, D = Arrow.RIGHT, Arrow.LEFT, Arrow.LEFT_DASHED


class DirectifyError(ValueError):
    pass


class TermSizeError(DirectifyError):
    pass


def star_pairs(n: int, lowest: int = 1):
    """Pairs (i, j), lowest ≤ i < j ≤ n, with i odd or j ≥ i + 2."""
    for i in range(lowest, n + 1):
        for j in range(i + 1, n + 1):
            if i % 2 == 1 or j >= i + 2:
                yield i, j


def _rel(w: WitnessedPath, calc: Calculus, i: int, j: int, solid: bool) -> Edge:
    """An edge s_i → s_j (or ⇢) available in ``w``."""
    if i == j:
        return calc.refl(w.point(i), solid=True)
    for k in (min(i, j),):
        if k < w.n and w.step_ends(k) == (i, j):
            e = w.step(k)
            if solid and not e.solid:
                break
            return e
    if solid:
        raise DirectifyError(f"no solid edge s{i} → s{j}")
    e = w.extra.get((i, j))
    if e is None:
        raise DirectifyError(f"no dashed edge s{i} ⇢ s{j}")
    return e


def _guard(w: WitnessedPath, max_nodes: int | None):
    if max_nodes is None:
        return
    for e in w.steps:
        size = len(dag_nodes(e.witness))
        if size > max_nodes:
            raise TermSizeError(f"witness of {size} DAG nodes exceeds --max-term-nodes={max_nodes}")


def rebuild(w: WitnessedPath, calc: Calculus, A: dict, B: dict, arrows: tuple,
            pairs) -> WitnessedPath:
    """New points s̄_i(s_{A_i}, s_{B_i}); steps and the listed pairs re-derived.

    A step whose orientation is kept uses the forward frame rule with
    premises A_p → A_q, A_p ⇢ B_q, B_p → B_q; a flipped step uses the
    reversed frame with A_p → A_q, B_p ⇢ A_q, B_p → B_q, where p → q is the
    new forward direction.  Distant pairs use the dashed forward rule on the
    old distant edge, except that s_1 and s_n pairs come straight from x̄ ⇢ s
    and s ⇢ z̄.
    """
    n = w.n
    points = [compose_point(w.point(i), w.point(A[i]), w.point(B[i])) for i in range(1, n + 1)]
    if not calc.same(points[0], X) or not calc.same(points[-1], Z):
        raise DirectifyError("rebuild must keep the endpoints")
    new_pattern = PatternPath(tuple(arrows))
    out = WitnessedPath(new_pattern, points, [], {}, w.caveat)
    steps = []
    for k in range(1, n):
        fr = w.step(k)
        p, q = out.step_ends(k)
        solid = new_pattern.arrows[k - 1].solid
        if w.step_ends(k) == (p, q):
            e = calc.frame(fr, _rel(w, calc, A[p], A[q], solid), _rel(w, calc, A[p], B[q], False),
                           _rel(w, calc, B[p], B[q], solid))
        else:
            e = calc.frame(fr, _rel(w, calc, A[p], A[q], solid), _rel(w, calc, B[p], A[q], False),
                           _rel(w, calc, B[p], B[q], solid), reverse=True)
        if solid and not e.solid:
            raise DirectifyError(f"step {k} should be solid")
        steps.append(e)
    out.steps = steps
    extra = {}
    ends = []
    for i, j in pairs:
        if i == 1 or j == n:
            ends.append((i, j))
        else:
            fr = w.extra.get((i, j))
            if fr is None:
                raise DirectifyError(f"missing distant edge s{i} ⇢ s{j}")
            extra[i, j] = calc.frame(fr, _rel(w, calc, A[i], A[j], False),
                                     _rel(w, calc, A[i], B[j], False),
                                     _rel(w, calc, B[i], B[j], False)).dashed()
    out.extra = extra
    return _add_end_pairs(canonicalize(out, calc), calc, ends)


def _add_end_pairs(w: WitnessedPath, calc: Calculus, ends) -> WitnessedPath:
    """x̄ ⇢ s_j and s_i ⇢ z̄, built on the rebound points."""
    for i, j in ends:
        w.extra[i, j] = calc.from_x(w.point(j)) if i == 1 else calc.to_z(w.point(i))
    return w


def _check_jonsson_shape(w: WitnessedPath):
    arrows = w.pattern.arrows
    for k, a in enumerate(arrows, start=1):
        want = R if k % 2 else L
        if a is want or (k == len(arrows) and a is D and k % 2 == 0):
            continue
        raise DirectifyError(f"position {k}: expected {want.value}, found {a.value}")


def strengthen_star(w: WitnessedPath, calc: Calculus, max_nodes: int | None = None) -> WitnessedPath:
    """Add the distant dashed edges s_i ⇢ s_j (i odd or j ≥ i+2) to a Jónsson path."""
    _check_jonsson_shape(w)
    n = w.n
    h0 = n - 1 if n % 2 else n - 2
    cur = WitnessedPath(w.pattern, list(w.points), list(w.steps), {}, w.caveat)
    for i, j in star_pairs(n, max(h0, 2)):
        if j == n:
            cur.extra[i, j] = calc.to_z(cur.point(i))
    for h in range(h0 - 2, 1, -2):
        cur = _star_pass(cur, calc, h)
        _guard(cur, max_nodes)
    for j in range(2, n + 1):
        cur.extra[1, j] = calc.from_x(cur.point(j))
    for i, j in star_pairs(n, 2):
        if (i, j) not in cur.extra:
            if j == n:
                cur.extra[i, j] = calc.to_z(cur.point(i))
            else:
                raise DirectifyError(f"distant edge s{i} ⇢ s{j} missing after induction")
    return cur


def _star_pass(w: WitnessedPath, calc: Calculus, h: int) -> WitnessedPath:
    n = w.n

    def a(j):
        return j - 2 if j <= h + 2 else h

    new = [None, X, w.point(2), w.point(3)]
    for j in range(4, n + 1):
        new.append(compose_point(w.point(j), new[a(j)], Z))
    out = WitnessedPath(w.pattern, new[1:], [], {}, w.caveat)
    steps = [w.step(1), w.step(2)]
    for k in range(3, n):
        fr = w.step(k)
        inner = steps[k - 3] if k + 1 <= h + 2 else calc.refl(new[h])
        e = calc.ve(fr, inner)
        if k == n - 1:
            e = replace(e, rule={R: "VH1", L: "VH2", D: "VH3"}[w.arrow(k)])
        steps.append(e)
    out.steps = steps
    ends = []
    for i, j in star_pairs(n, h):
        if j == n:
            ends.append((i, j))
        elif i >= h + 2:
            fr = w.extra.get((i, j))
            if fr is None:
                raise DirectifyError(f"missing distant edge s{i} ⇢ s{j} at h={h}")
            out.extra[i, j] = calc.ve(fr, calc.refl(new[h])).dashed()
        elif i == h + 1:
            out.extra[i, j] = calc.vk1(w.point(j), steps[h - 1], calc.to_z(new[h + 1]))
        else:
            out.extra[i, j] = calc.vk1(w.point(j), calc.refl(new[h]), calc.to_z(new[h]))
    return _add_end_pairs(canonicalize(out, calc), calc, ends)


def flip_step(w: WitnessedPath, calc: Calculus, h: int, pairs=None) -> WitnessedPath:
    """Turn the arrow at position h to the right by the two-argument rebuild.

    h = 2 is the bootstrap producing three leading right arrows.
    """
    n = w.n
    if not 2 <= h <= n - 1:
        raise DirectifyError(f"flip position {h} out of range")
    A = {i: (i if i <= h else h) for i in range(1, n + 1)}
    B = {i: (h + 1 if i <= h else i) for i in range(1, n + 1)}
    arrows = list(w.pattern.arrows)
    arrows[h - 1] = R
    if pairs is None:
        pairs = list(star_pairs(n))
    return rebuild(w, calc, A, B, tuple(arrows), pairs)


@dataclass
class DirectifyResult:
    path: WitnessedPath
    calc: Calculus
    stages: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def terms(self) -> list[Term]:
        return self.path.terms()


def run_pipeline(w: WitnessedPath, calc: Calculus, max_nodes: int | None = None) -> DirectifyResult:
    """strengthen_star, the bootstrap, then flips at h = 4, 6, ... while possible."""
    res = DirectifyResult(w, calc, {"input": w})
    if w.n == 2:
        return res
    cur = strengthen_star(w, calc, max_nodes)
    res.stages["star"] = cur
    if cur.arrow(2) is L:
        cur = flip_step(cur, calc, 2)
        _guard(cur, max_nodes)
        res.stages["bootstrap"] = cur
        h = 4
        while h <= cur.n - 1 and cur.arrow(h) is L:
            cur = flip_step(cur, calc, h)
            _guard(cur, max_nodes)
            res.stages[f"flip{h}"] = cur
            h += 2
    res.path = cur
    return res


def make_theory(pattern: PatternPath, terms: list[Term], idempotent: bool = True,
                extra_symbols=()) -> Theory:
    syms = {}
    for t in terms:
        for node in dag_nodes(t):
            if not node.is_var:
                syms[node.head] = len(node.args)
    for name, arity in extra_symbols:
        syms.setdefault(name, arity)
    return Theory(pattern_identities(pattern, terms), sorted(syms.items()), idempotent)


def _prepare(condition: str, terms: list[Term], calc: Calculus | None):
    pattern = catalog_path(condition, len(terms) + 1)
    if calc is None:
        calc = Calculus(make_theory(pattern, terms))
    return terms_to_path(pattern, terms, calc), calc


def directify(terms: list[Term], calc: Calculus | None = None,
              max_nodes: int | None = None) -> DirectifyResult:
    """Jónsson terms t_1..t_{n-1} to directed Jónsson terms d_1..d_{n-1}."""
    w, calc = _prepare("jonsson", terms, calc)
    res = run_pipeline(w, calc, max_nodes)
    _expect(res.path, catalog_path("directed-jonsson", w.n))
    return res


def _expect(w: WitnessedPath, pattern: PatternPath):
    if w.pattern != pattern:
        raise DirectifyError(f"pipeline produced {w.pattern}, expected {pattern}")


def _with_leading_x(w: WitnessedPath, calc: Calculus) -> WitnessedPath:
    pattern = PatternPath((R,) + w.pattern.arrows)
    return WitnessedPath(pattern, [X] + list(w.points), [calc.refl(X)] + list(w.steps), {}, w.caveat)


def _drop_leading(w: WitnessedPath, calc: Calculus) -> WitnessedPath:
    if not (w.point(2) is X or (not calc.symbolic and calc.same(w.point(2), X))):
        raise DirectifyError("second point is no longer x̄; cannot drop it")
    extra = {(i - 1, j - 1): e for (i, j), e in w.extra.items() if i >= 2}
    out = WitnessedPath(PatternPath(w.pattern.arrows[1:]), list(w.points[1:]),
                        list(w.steps[1:]), extra, w.caveat)
    out.points[0] = X
    return out


def _via_prepend(w: WitnessedPath, calc: Calculus, max_nodes) -> DirectifyResult:
    longer = _with_leading_x(w, calc)
    res = run_pipeline(longer, calc, max_nodes)
    res.notes.append(f"s2 after the pipeline: {to_sexpr(res.path.point(2), 40)}")
    res.path = _drop_leading(res.path, calc)
    res.stages["input"] = w
    return res


def alvin_to_directed(terms: list[Term], calc: Calculus | None = None,
                      max_nodes: int | None = None) -> DirectifyResult:
    """n alvin terms to n directed Jónsson terms, through a Jónsson path of length n+1."""
    w, calc = _prepare("alvin", terms, calc)
    res = _via_prepend(w, calc, max_nodes)
    _expect(res.path, catalog_path("directed-jonsson", w.n))
    return res


def gumm_to_directed_gumm(terms: list[Term], calc: Calculus | None = None,
                          max_nodes: int | None = None) -> DirectifyResult:
    """n Gumm terms (in the exchanged orientation) to n directed Gumm terms."""
    w, calc = _prepare("gumm", terms, calc)
    if w.n % 2:
        res = run_pipeline(w, calc, max_nodes)
    else:
        res = _via_prepend(w, calc, max_nodes)
    _expect(res.path, catalog_path("directed-gumm", w.n))
    return res


CONVERTERS = {"jonsson": directify, "alvin": alvin_to_directed, "gumm": gumm_to_directed_gumm}
TARGETS = {"jonsson": "directed-jonsson", "alvin": "directed-jonsson", "gumm": "directed-gumm"}


# -- certificate bundles --------------------------------------------------------

def edge_record(e: Edge, table: TermTable, index: dict) -> dict:
    rec = {"witness": table.add(e.witness), "tail": table.add(e.tail),
           "head": table.add(e.head), "kind": e.kind, "rule": e.rule}
    if e.model_checked:
        rec["model_checked"] = True
        rec["proofs"] = {}
        return rec
    proofs = {"tail": index[id(e.p_tail)], "head": index[id(e.p_head)]}
    if e.solid:
        proofs["solid"] = index[id(e.p_solid)]
    rec["proofs"] = proofs
    return rec


def build_bundle(w: WitnessedPath, calc: Calculus, inputs: dict | None = None,
                 include_extra: bool = True) -> dict:
    """Serialize the path with the proofs of every step and distant edge.

    Terms are a shared node table: a row is a variable name or
    [symbol, child row ids...]; claims and edges refer to rows by id.
    """
    table = TermTable()
    edges = list(w.steps)
    labels = [f"step:{i}" for i in range(1, w.n)]
    if include_extra:
        for key in sorted(w.extra):
            edges.append(w.extra[key])
            labels.append(f"pair:{key[0]},{key[1]}")
    roots = []
    for e in edges:
        roots.extend(p for p in (e.p_tail, e.p_head, e.p_solid) if p is not None)
    rows, index = serialize_steps(roots, table)
    records = []
    for label, e in zip(labels, edges):
        rec = edge_record(e, table, index)
        rec["label"] = label
        records.append(rec)
    theory = calc.theory
    bundle = {
        "format": "jonsson-certificate/1",
        "pattern": str(w.pattern),
        "points": [table.add(p) for p in w.points],
        "outputs": [table.add(e.witness) for e in w.steps],
        "hypotheses": theory.to_json() if theory is not None else {},
        "symbols": sorted(theory.symbols.items()) if theory is not None else [],
        "idempotent": bool(theory.idempotent) if theory is not None else True,
        "steps": rows,
        "edges": records,
        "terms": table.rows,
    }
    bundle["manifest"] = manifest(inputs or {})
    return bundle


def output_terms(bundle: dict) -> list[Term]:
    from .proofs import load_terms
    terms = load_terms(bundle["terms"])
    return [terms[i] for i in bundle["outputs"]]
