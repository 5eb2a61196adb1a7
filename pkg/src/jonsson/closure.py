"""Full dashed closure of a realized path over a finite F2, and arrow flipping.

Only model mode is supported for the closure: termination of the iteration
below rests on F2 being finite, and nothing is claimed otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import FiniteAlgebra, generate_free, verify_model
from .catalog import Arrow, PatternPath, pattern_identities
from .directify import DirectifyError, rebuild
from .edges import Calculus, ModelCalculus, compose_point, edge_set, model_edges
from .paths import WitnessedPath, canonicalize, path_to_terms, realize_in_model
from .terms import X


class ClosureError(ValueError):
    pass


@dataclass
class ClosureReport:
    iterations: dict = field(default_factory=dict)  # k -> (p, p')
    bound: int = 0


def _require_model(calc: Calculus):
    if calc.symbolic:
        raise ClosureError("dashed closure needs a finite F2 (model mode); "
                           "the symbolic case is not supported")


def iterate_pk(w: WitnessedPath, calc: ModelCalculus, k: int, report: ClosureReport | None = None):
    """Return a path with s_i ⇢ s_k for all i ≤ k, keeping earlier pairs below k.

    Level p+1 is s̄_i(x̄, s^(p)_k) for i ≤ k and s̄_i(x̄, s^(p)_i) for i ≥ k,
    with s^(0) = s.  The iteration stops at the first p having some
    0 < p' < p with the same k-th table, and the edges to s_k come from a
    chain of the second (k) rule through the p - p' nested composites.
    """
    _require_model(calc)
    n = w.n
    if not 1 <= k <= n:
        raise ClosureError(f"k={k} out of range")
    base = w.points
    levels = [list(base)]
    level_steps = [list(w.steps)]
    seen = {}
    limit = len(calc.F2) + 1 if calc.F2 is not None else 10_000
    p = 0
    while True:
        p += 1
        prev = levels[-1]
        pts = [calc.canon(compose_point(base[i - 1], X, prev[k - 1] if i <= k else prev[i - 1]))
               for i in range(1, n + 1)]
        steps = []
        for i in range(1, n):
            fr = w.step(i)
            if i + 1 <= k:
                inner = calc.refl(prev[k - 1])
            else:
                inner = level_steps[-1][i - 1]
            steps.append(calc.ve(fr, inner, second=True))
        levels.append(pts)
        level_steps.append(steps)
        key = calc.tab2(pts[k - 1])
        if key in seen:
            p_prime = seen[key]
            break
        seen[key] = p
        if p > limit:
            raise ClosureError("iteration did not close; is F2 complete?")
    out = WitnessedPath(w.pattern, levels[p], level_steps[p], {}, w.caveat)
    prev = levels[p - 1]
    for (i, j), e in w.extra.items():
        if j < k:
            out.extra[i, j] = calc.ve(e, calc.refl(prev[k - 1]), second=True).dashed()
    target = levels[p_prime][k - 1]
    for i in range(1, k):
        cur = calc.refl(target, solid=False)
        for m in range(p_prime, p - 1):
            cur = calc.vk2(base[k - 1], calc.from_x(target), cur)
        e = calc.vk2(base[i - 1], calc.from_x(target), cur)
        out.extra[i, k] = e
    if report is not None:
        report.iterations[k] = (p, p_prime)
    return canonicalize(out, calc)


def dashed_closure(w: WitnessedPath, calc: ModelCalculus, report: ClosureReport | None = None):
    """Apply the iteration for k = 1..n, giving s_i ⇢ s_j for all i ≤ j."""
    _require_model(calc)
    if report is not None and calc.F2 is not None:
        report.bound = len(calc.F2) + 1
    for k in range(1, w.n + 1):
        w = iterate_pk(w, calc, k, report)
    return w


def flip_arrows(w: WitnessedPath, g: PatternPath, calc: Calculus) -> WitnessedPath:
    """Turn the left solid arrows of ``w`` where ``g`` has right arrows.

    Needs all pairs s_i ⇢ s_j, which every flip preserves.
    """
    f = w.pattern
    if g.n != f.n:
        raise ClosureError("patterns have different lengths")
    for i, (a, b) in enumerate(zip(f.arrows, g.arrows), start=1):
        if a is not Arrow.LEFT and a is not b:
            raise ClosureError(f"position {i}: only left solid arrows may change")
        if a is Arrow.LEFT and b not in (Arrow.LEFT, Arrow.RIGHT):
            raise ClosureError(f"position {i}: a solid arrow cannot become dashed here")
    n = w.n
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    missing = [p for p in pairs if p not in w.extra and not _is_right_step(w, *p)]
    if missing:
        raise ClosureError(f"closure incomplete, missing {missing[:5]}")
    for h in range(1, n):
        if w.arrow(h) is Arrow.LEFT and g.arrows[h - 1] is Arrow.RIGHT:
            A = {i: (i if i <= h else h) for i in range(1, n + 1)}
            B = {i: (h + 1 if i <= h else i) for i in range(1, n + 1)}
            arrows = list(w.pattern.arrows)
            arrows[h - 1] = Arrow.RIGHT
            try:
                w = rebuild(w, calc, A, B, tuple(arrows), pairs)
            except DirectifyError as exc:
                raise ClosureError(str(exc)) from exc
    return w


def _is_right_step(w, i, j):
    return j == i + 1 and w.arrow(i) is Arrow.RIGHT


def closure_confirmed(w: WitnessedPath, F2, edges) -> list:
    """Pairs of the closure that the free algebra edge list does not contain."""
    known = {(a, b) for a, b, _ in edge_set(edges, F2)}
    alg = F2.algebra
    bad = []
    for (i, j), e in sorted(w.extra.items()):
        a = F2.index_of(alg.tabulate(w.point(i), 2))
        b = F2.index_of(alg.tabulate(w.point(j), 2))
        if (a, b) not in known:
            bad.append((i, j))
    return bad


@dataclass
class VariantResult:
    terms: list
    path: WitnessedPath
    closed: WitnessedPath
    report: ClosureReport
    verified: bool
    counterexample: object = None


def realize_variant(alg: FiniteAlgebra, f: PatternPath, g: PatternPath,
                    F2=None, F3=None) -> VariantResult:
    """Realize f in the algebra, close it, flip to g and check g's identities."""
    ok, bad = alg.check_idempotent()
    if not ok:
        raise ClosureError(f"algebra is not idempotent: {bad}")
    F2 = F2 or generate_free(alg, 2)
    F3 = F3 or generate_free(alg, 3)
    edges, complete = model_edges(F2, F3)
    w = realize_in_model(f, edges, F2, complete)
    if w is None:
        raise ClosureError(f"pattern {f} is not realized in {alg.name}")
    calc = ModelCalculus(alg, F2, F3)
    report = ClosureReport()
    closed = dashed_closure(w, calc, report)
    out = flip_arrows(closed, g, calc)
    terms = path_to_terms(out)
    verdict, cex = verify_model(alg, {}, pattern_identities(g, terms))
    return VariantResult(terms, out, closed, report, verdict, cex)
