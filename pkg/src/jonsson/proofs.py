"""Equational proof certificates: construction and mechanical replay.

A proof is a DAG of steps, each claiming ``lhs ≈ rhs`` with one of the
justifications

    AXIOM(id, σ)   the σ-instance of a hypothesis identity
    REFL           t ≈ t
    SYM(p)         from a ≈ b infer b ≈ a
    TRANS(p, q)    from a ≈ b and b ≈ c infer a ≈ c
    CONG(p, path)  from a ≈ b infer C[a] ≈ C[b], the hole addressed by a path
                   of child indices
    INST(p, σ)     from a ≈ b infer σ(a) ≈ σ(b)

Builders live here so that the edge calculus can emit certificates while it
constructs witnesses; :func:`replay` is the independent checker and works on
the serialized form only.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .terms import (VARIABLES, X, Identity, Term, TermError, dag_nodes,
                    substitute, to_sexpr)

KINDS = ("AXIOM", "REFL", "SYM", "TRANS", "CONG", "INST")


class ProofError(ValueError):
    pass


class MissingAxiom(ProofError):
    pass


class Step:
    __slots__ = ("lhs", "rhs", "kind", "premises", "data")

    def __init__(self, lhs: Term, rhs: Term, kind: str, premises: tuple = (), data=None):
        self.lhs = lhs
        self.rhs = rhs
        self.kind = kind
        self.premises = premises
        self.data = data

    @property
    def claim(self) -> tuple[Term, Term]:
        return self.lhs, self.rhs

    def __repr__(self):
        return f"Step({self.kind}: {to_sexpr(self.lhs, 80)} ≈ {to_sexpr(self.rhs, 80)})"


def _freeze(sigma: Mapping[str, Term]) -> tuple:
    return tuple(sorted((v, t) for v, t in sigma.items() if t is not Term(v)))


class Theory:
    """Hypothesis identities keyed by id, with optional idempotence axioms."""

    def __init__(self, identities: Iterable[Identity], symbols: Iterable[tuple] = (),
                 idempotent: bool = True):
        self.axioms: dict[str, Identity] = {}
        for k, ident in enumerate(identities):
            self.axioms[ident.name or f"h{k}"] = ident
        self.idempotent = idempotent
        self.symbols = dict(symbols)
        if idempotent:
            for name, arity in self.symbols.items():
                if arity == 0:
                    continue
                self.axioms[f"idem:{name}"] = Identity(Term(name, (X,) * arity), X, f"idem:{name}")
        self._idem_memo: dict = {}
        self._diag_memo: dict = {}

    def to_json(self) -> dict:
        return {k: {"lhs": to_sexpr(i.lhs), "rhs": to_sexpr(i.rhs)} for k, i in self.axioms.items()}

    # -- builders --------------------------------------------------------

    def axiom(self, name: str, sigma: Mapping[str, Term] | None = None) -> Step:
        if name not in self.axioms:
            raise MissingAxiom(f"no hypothesis {name!r}")
        ident = self.axioms[name]
        sigma = dict(sigma or {})
        return Step(substitute(ident.lhs, sigma), substitute(ident.rhs, sigma), "AXIOM",
                    (), (name, _freeze(sigma)))

    def idem(self, t: Term) -> Step:
        """Proof of t[x, y, z := x] ≈ x, built from the idempotence axioms."""
        memo = self._idem_memo
        for node in dag_nodes(t):
            if node in memo:
                continue
            if node.is_var:
                memo[node] = refl(X)
                continue
            name = f"idem:{node.head}"
            if name not in self.axioms:
                raise MissingAxiom(f"idempotence of {node.head!r} is not available")
            diag = substitute(node, {"y": X, "z": X}, self._diag_memo)
            inner = congruence(diag, [memo[c] for c in node.args])
            memo[node] = trans(inner, self.axiom(name))
        return memo[t]


def refl(t: Term) -> Step:
    return Step(t, t, "REFL")


def sym(p: Step) -> Step:
    if p.kind == "REFL":
        return p
    if p.kind == "SYM":
        return p.premises[0]
    return Step(p.rhs, p.lhs, "SYM", (p,))


def trans(p: Step, q: Step) -> Step:
    if p.rhs is not q.lhs:
        raise ProofError(f"cannot chain {p} with {q}")
    if p.kind == "REFL":
        return q
    if q.kind == "REFL":
        return p
    return Step(p.lhs, q.rhs, "TRANS", (p, q))


def chain(*steps: Step) -> Step:
    out = steps[0]
    for s in steps[1:]:
        out = trans(out, s)
    return out


def inst(p: Step, sigma: Mapping[str, Term]) -> Step:
    frozen = _freeze(sigma)
    if not frozen:
        return p
    if p.kind == "REFL":
        return refl(substitute(p.lhs, sigma))
    return Step(substitute(p.lhs, sigma), substitute(p.rhs, sigma), "INST", (p,), frozen)


def congruence(lhs: Term, child_proofs: list[Step]) -> Step:
    """From proofs c_j ≈ d_j of the children of ``lhs`` prove f(c) ≈ f(d)."""
    cur = lhs
    out = refl(lhs)
    for j, p in enumerate(child_proofs):
        if p.kind == "REFL":
            continue
        if cur.args[j] is not p.lhs:
            raise ProofError("congruence premise does not match child")
        new = Term(cur.head, cur.args[:j] + (p.rhs,) + cur.args[j + 1:])
        out = trans(out, Step(cur, new, "CONG", (p,), (j,)))
        cur = new
    return out


def cong_subst(t: Term, proofs: Mapping[str, Step]) -> Step:
    """Proof of t[v := a_v] ≈ t[v := b_v] from proofs a_v ≈ b_v."""
    lhs_map = {v: p.lhs for v, p in proofs.items()}
    memo: dict = {}
    lhs_memo: dict = {}
    for node in dag_nodes(t):
        if node.is_var:
            p = proofs.get(node.head)
            memo[node] = p if p is not None else refl(node)
            lhs_memo[node] = memo[node].lhs
        elif not node.args:
            memo[node] = refl(node)
            lhs_memo[node] = node
        else:
            lhs_node = Term(node.head, tuple(lhs_memo[c] for c in node.args))
            lhs_memo[node] = lhs_node
            memo[node] = congruence(lhs_node, [memo[c] for c in node.args])
    result = memo[t]
    assert result.lhs is substitute(t, lhs_map)
    return result


# -- serialization ------------------------------------------------------------

class TermTable:
    def __init__(self):
        self.ids: dict[Term, int] = {}
        self.rows: list = []

    def add(self, t: Term) -> int:
        if t in self.ids:
            return self.ids[t]
        for node in dag_nodes(t):
            if node in self.ids:
                continue
            if node.is_var:
                row = node.head
            else:
                row = [node.head] + [self.ids[c] for c in node.args]
            self.ids[node] = len(self.rows)
            self.rows.append(row)
        return self.ids[t]


def _subst_json(table: TermTable, frozen: tuple) -> dict:
    return {v: table.add(t) for v, t in frozen}


def serialize_steps(roots: Iterable[Step], table: TermTable):
    """Number all steps reachable from ``roots`` in dependency order."""
    index: dict[int, int] = {}
    rows: list[dict] = []
    for root in roots:
        if root is None or id(root) in index:
            continue
        stack = [(root, False)]
        while stack:
            step, expanded = stack.pop()
            if id(step) in index:
                continue
            if not expanded:
                stack.append((step, True))
                for p in reversed(step.premises):
                    if id(p) not in index:
                        stack.append((p, False))
                continue
            just: dict = {"kind": step.kind,
                          "premises": [index[id(p)] for p in step.premises]}
            if step.kind == "AXIOM":
                just["axiom"] = step.data[0]
                just["subst"] = _subst_json(table, step.data[1])
            elif step.kind == "INST":
                just["subst"] = _subst_json(table, step.data)
            elif step.kind == "CONG":
                just["path"] = list(step.data)
            index[id(step)] = len(rows)
            rows.append({"claim": {"lhs": table.add(step.lhs), "rhs": table.add(step.rhs)},
                         "just": just})
    return rows, index


def load_terms(rows: list) -> list[Term]:
    terms: list[Term] = []
    for k, row in enumerate(rows):
        if isinstance(row, str):
            if row not in VARIABLES:
                raise ProofError(f"term row {k}: bad variable {row!r}")
            terms.append(Term(row))
        else:
            name, *children = row
            if any(not isinstance(c, int) or not 0 <= c < k for c in children):
                raise ProofError(f"term row {k}: bad child reference")
            terms.append(Term(name, tuple(terms[c] for c in children)))
    return terms


# -- replay -------------------------------------------------------------------

@dataclass
class Verdict:
    ok: bool
    failed_step: int | None = None
    reason: str = ""
    rejected_edges: list = field(default_factory=list)
    checked_steps: int = 0

    def __bool__(self):
        return self.ok


def _walk(t: Term, path: list[int]) -> Term:
    for j in path:
        t = t.args[j]
    return t


def check_step(k: int, lhs: Term, rhs: Term, just: dict, claims: list,
               axioms: Mapping[str, Identity], terms: list[Term]) -> str | None:
    """Return None if the step is valid, else a reason."""
    kind = just.get("kind")
    prem = just.get("premises", [])
    if kind not in KINDS:
        return f"unknown justification {kind!r}"
    if any(not isinstance(p, int) or not 0 <= p < k for p in prem):
        return "premise must reference an earlier step"
    arity = {"AXIOM": 0, "REFL": 0, "SYM": 1, "TRANS": 2, "CONG": 1, "INST": 1}[kind]
    if len(prem) != arity:
        return f"{kind} takes {arity} premises"
    ps = [claims[p] for p in prem]

    def sigma():
        raw = just.get("subst", {})
        if any(v not in VARIABLES for v in raw):
            raise ProofError("substitution on non-variable")
        return {v: terms[i] for v, i in raw.items()}

    if kind == "REFL":
        return None if lhs is rhs else "REFL claim sides differ"
    if kind == "AXIOM":
        name = just.get("axiom")
        if name not in axioms:
            return f"unknown hypothesis {name!r}"
        s = sigma()
        ident = axioms[name]
        if substitute(ident.lhs, s) is lhs and substitute(ident.rhs, s) is rhs:
            return None
        return f"claim is not an instance of {name}"
    if kind == "SYM":
        a, b = ps[0]
        return None if (lhs, rhs) == (b, a) else "SYM claim mismatch"
    if kind == "TRANS":
        (a, b), (c, d) = ps
        if b is not c:
            return "TRANS premises do not chain"
        return None if (lhs is a and rhs is d) else "TRANS claim mismatch"
    if kind == "INST":
        a, b = ps[0]
        s = sigma()
        return None if (substitute(a, s) is lhs and substitute(b, s) is rhs) else "INST claim mismatch"
    # CONG
    path = just.get("path", [])
    a, b = ps[0]
    l, r = lhs, rhs
    for j in path:
        if l.is_var or r.is_var or l.head != r.head or len(l.args) != len(r.args):
            return "CONG context mismatch"
        if not 0 <= j < len(l.args):
            return "CONG position out of range"
        for m in range(len(l.args)):
            if m != j and l.args[m] is not r.args[m]:
                return "CONG context mismatch"
        l, r = l.args[j], r.args[j]
    if not path:
        return "CONG needs a position"
    return None if (l is a and r is b) else "CONG hole mismatch"


def replay_bundle(bundle: dict, hypotheses: Iterable[Identity] | None = None,
                  symbols: Iterable[tuple] | None = None,
                  idempotent: bool | None = None) -> Verdict:
    """Check every step of a serialized certificate bundle.

    Hypotheses default to those embedded in the bundle.  Passing them
    explicitly checks the certificate against an independent theory.
    """
    try:
        terms = load_terms(bundle["terms"])
        if hypotheses is None:
            axioms = {k: Identity(_sexpr(v["lhs"]), _sexpr(v["rhs"]), k)
                      for k, v in bundle["hypotheses"].items()}
        else:
            if idempotent is None:
                idempotent = bundle.get("idempotent", True)
            axioms = Theory(hypotheses, symbols or [], idempotent).axioms
        claims: list = []
        failed = None
        reason = ""
        for k, row in enumerate(bundle["steps"]):
            lhs = terms[row["claim"]["lhs"]]
            rhs = terms[row["claim"]["rhs"]]
            claims.append((lhs, rhs))
            why = check_step(k, lhs, rhs, row["just"], claims, axioms, terms)
            if why is not None and failed is None:
                failed, reason = k, why
        rejected = []
        for e, edge in enumerate(bundle.get("edges", [])):
            why = _check_edge(edge, claims, terms, failed)
            if why:
                rejected.append((e, why))
                if not reason:
                    reason = f"edge {e}: {why}"
        shape = _check_shape(bundle, terms)
        if shape:
            rejected.append((None, shape))
            reason = reason or shape
        ok = failed is None and not rejected
        return Verdict(ok, failed, reason, rejected, len(claims))
    except (KeyError, IndexError, TypeError, ValueError, TermError) as exc:
        return Verdict(False, None, f"malformed bundle: {exc}")


def _check_shape(bundle: dict, terms: list[Term]) -> str:
    """The step edges must connect the declared points as the pattern says."""
    if "pattern" not in bundle:
        return ""
    from .catalog import parse_arrows
    arrows = parse_arrows(bundle["pattern"]) if bundle["pattern"] else ()
    points = [terms[i] for i in bundle["points"]]
    if len(points) != len(arrows) + 1:
        return "point count does not match the pattern"
    if points[0] != X or points[-1] != Term("z"):
        return "path must run from x to z"
    steps = {e["label"]: e for e in bundle["edges"] if e.get("label", "").startswith("step:")}
    outputs = bundle.get("outputs", [])
    for i, a in enumerate(arrows, start=1):
        e = steps.get(f"step:{i}")
        if e is None:
            return f"no edge for step {i}"
        src, dst = (i, i + 1) if a.value == ">" else (i + 1, i)
        if terms[e["tail"]] != points[src - 1] or terms[e["head"]] != points[dst - 1]:
            return f"step {i} does not connect its points"
        if a.solid and e["kind"] != "SOLID":
            return f"step {i} must be solid"
        if len(outputs) >= i and terms[outputs[i - 1]] != terms[e["witness"]]:
            return f"output {i} is not the witness of step {i}"
    for e in bundle["edges"]:
        label = e.get("label", "")
        if label.startswith("pair:"):
            i, j = (int(v) for v in label[5:].split(","))
            if terms[e["tail"]] != points[i - 1] or terms[e["head"]] != points[j - 1]:
                return f"edge {label} does not connect its points"
    return ""


def _sexpr(text: str) -> Term:
    from .terms import parse_term
    return parse_term(text)


def _check_edge(edge: dict, claims: list, terms: list[Term], failed: int | None) -> str:
    if edge.get("model_checked"):
        return ""
    w = terms[edge["witness"]]
    tail, head = terms[edge["tail"]], terms[edge["head"]]
    proofs = edge["proofs"]
    expected = {"tail": (substitute(w, {"y": X}), tail),
                "head": (substitute(w, {"y": Term("z")}), head)}
    if edge["kind"] == "SOLID":
        expected["solid"] = (substitute(w, {"z": X}), X)
    for role, claim in expected.items():
        k = proofs.get(role)
        if k is None:
            return f"missing {role} proof"
        if failed is not None and k >= failed:
            return f"{role} proof depends on rejected step range (first failure {failed})"
        if claims[k] != claim:
            return f"{role} proof concludes the wrong identity"
    return ""


def manifest(inputs: dict) -> dict:
    from . import __version__
    blob = json.dumps(inputs, sort_keys=True).encode()
    return {"tool": "jonsson", "version": __version__, "inputs": inputs,
            "sha256": hashlib.sha256(blob).hexdigest()}
