"""Command line interface: ``jonsson <command> ...``.

Records go to stdout, one JSON object per line in a stable order; short
human summaries go to stderr.  Exit codes: 0 success, 1 verification
failure, 2 usage error, 3 cap reached or enumeration incomplete.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .algebra import AlgebraError, describe_table, generate_free, load_algebra, verify_model
from .catalog import CONDITIONS, CatalogError, catalog_path, identity_set, parse_arrows, PatternPath
from .closure import ClosureError, realize_variant
from .directify import CONVERTERS, TARGETS, DirectifyError, TermSizeError, build_bundle
from .edges import model_edges
from .paths import PathError, minimal_n, realize_in_model, to_dot
from .proofs import load_terms, replay_bundle
from .terms import ParseError, TermError, parse_term, to_sexpr

OK, FAILED, USAGE, INCOMPLETE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def emit(record: dict, out=None) -> None:
    print(json.dumps(record, ensure_ascii=False), file=out or sys.stdout)


def note(text: str) -> None:
    print(text, file=sys.stderr)


def read_terms(path: str) -> list:
    """One term per line; ``name = term`` lines define abbreviations.

    A defined name applied to three arguments expands to its body with
    x, y, z replaced, so later lines can use earlier definitions.
    """
    defs = {}
    terms = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if "=" in line:
                name, body = (s.strip() for s in line.split("=", 1))
                defs[name] = parse_term(body, defs=defs)
            else:
                terms.append(parse_term(line, defs=defs))
        except ParseError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    if not terms:
        # a file of definitions only: take them in order
        terms = list(defs.values())
    return terms


def condition_n(text: str):
    try:
        cond, n = text.split(",")
        return cond.strip(), int(n)
    except ValueError:
        raise UsageError(f"expected CONDITION,N, got {text!r}") from None


def pattern_arg(text: str) -> PatternPath:
    """A catalog name with n (``alvin-heads,4``) or an arrow string (``<>>``)."""
    if "," in text:
        return catalog_path(*condition_n(text))
    return PatternPath(parse_arrows(text))


def _free_pair(alg, cap):
    F2 = generate_free(alg, 2, cap)
    F3 = generate_free(alg, 3, cap)
    return F2, F3


def _path_records(w, kind="term"):
    for i, t in enumerate(w.terms(), start=1):
        emit({"record": kind, "index": i, "term": to_sexpr(t)})


# -- commands ------------------------------------------------------------------

def cmd_free(args) -> int:
    alg = load_algebra(args.algebra)
    F = generate_free(alg, args.arity, args.cap)
    for e in F.elements:
        emit({"record": "element", "index": e.index, "witness": to_sexpr(e.witness),
              "table": describe_table(e.table)})
    note(f"{alg.name}: |F{args.arity}| = {len(F)}, complete = {str(F.complete).lower()}")
    if not F.complete:
        note("warning: cap reached, the listing is a prefix of the free algebra")
        return INCOMPLETE
    return OK


def cmd_find(args) -> int:
    alg = load_algebra(args.algebra)
    F2, F3 = _free_pair(alg, args.cap)
    complete = F2.complete and F3.complete
    edges, _ = model_edges(F2, F3)
    if args.n is not None:
        w = realize_in_model(catalog_path(args.condition, args.n), edges, F2, complete)
        n = args.n if w is not None else None
    else:
        n, w = minimal_n(edges, F2, args.condition, args.min_n, complete)
    if w is None:
        emit({"record": "result", "condition": args.condition, "realized": False,
              "complete": complete})
        note(f"{args.condition}: not realizable" + ("" if complete else " (enumeration incomplete)"))
        return OK if complete else INCOMPLETE
    emit({"record": "result", "condition": args.condition, "realized": True, "n": n,
          "pattern": str(w.pattern), "complete": complete})
    _path_records(w)
    note(f"{args.condition}: realized with n = {n}")
    return OK if complete else INCOMPLETE


def cmd_directify(args) -> int:
    convert = CONVERTERS[args.condition]
    inputs = {"command": "directify", "condition": args.condition}
    if args.terms:
        terms = read_terms(args.terms)
        inputs["terms"] = [to_sexpr(t) for t in terms]
        alg = None
    else:
        alg = load_algebra(args.from_model)
        F2, F3 = _free_pair(alg, args.cap)
        edges, _ = model_edges(F2, F3)
        n, w = minimal_n(edges, F2, args.condition, args.min_n, F2.complete and F3.complete)
        if w is None:
            note(f"{args.condition} is not realized in {alg.name} with n <= {args.min_n}")
            return FAILED
        terms = w.terms()
        inputs.update({"model": alg.to_text(), "terms": [to_sexpr(t) for t in terms]})
    res = convert(terms, max_nodes=args.max_term_nodes)
    target = catalog_path(TARGETS[args.condition], res.path.n)
    for i, t in enumerate(res.terms, start=1):
        emit({"record": "term", "index": i, "term": to_sexpr(t)})
    if alg is not None:
        from .catalog import pattern_identities
        ok, cex = verify_model(alg, {}, pattern_identities(target, res.terms))
        emit({"record": "model-check", "ok": ok})
        if not ok:
            note(f"model check failed: {cex}")
            return FAILED
    if args.certs:
        bundle = build_bundle(res.path, res.calc, inputs)
        Path(args.certs).write_text(json.dumps(bundle))
        note(f"certificate bundle written to {args.certs} ({len(bundle['steps'])} steps)")
    if args.dot:
        Path(args.dot).write_text(to_dot(res.path))
    note(f"{args.condition} -> {TARGETS[args.condition]}: {len(res.terms)} terms, pattern {res.path.pattern}")
    return OK


def cmd_flip(args) -> int:
    alg = load_algebra(args.algebra)
    f, g = pattern_arg(args.f), pattern_arg(args.g)
    F2, F3 = _free_pair(alg, args.cap)
    res = realize_variant(alg, f, g, F2, F3)
    for i, t in enumerate(res.terms, start=1):
        emit({"record": "term", "index": i, "term": to_sexpr(t)})
    emit({"record": "model-check", "ok": res.verified})
    for k, (p, q) in sorted(res.report.iterations.items()):
        note(f"k={k}: repeat at p={p}, p'={q}")
    if args.dot:
        Path(args.dot).write_text(to_dot(res.path))
    return OK if res.verified else FAILED


def cmd_verify(args) -> int:
    if args.certs:
        bundle = json.loads(Path(args.certs).read_text())
        if args.hypotheses:
            cond, n = condition_n(args.hypotheses)
            syms = [(f"t{i}", 3) for i in range(1, n)]
            verdict = replay_bundle(bundle, identity_set(cond, n), syms)
        else:
            verdict = replay_bundle(bundle)
        emit({"record": "replay", "ok": verdict.ok, "steps": verdict.checked_steps,
              "failed_step": verdict.failed_step, "reason": verdict.reason})
        note("certificates accepted" if verdict.ok else
             f"rejected at step {verdict.failed_step}: {verdict.reason}")
        return OK if verdict.ok else FAILED
    if not (args.model and args.terms and args.identities):
        raise UsageError("verify needs --certs, or --model with --terms and --identities")
    from .catalog import pattern_identities
    alg = load_algebra(args.model)
    cond, n = condition_n(args.identities)
    terms = read_terms(args.terms)
    if len(terms) != n - 1:
        raise UsageError(f"{cond},{n} needs {n - 1} terms, got {len(terms)}")
    ok, cex = verify_model(alg, {}, pattern_identities(catalog_path(cond, n), terms))
    rec = {"record": "model-check", "ok": ok}
    if cex is not None:
        ident, env = cex
        rec.update({"identity": ident.name, "assignment": env})
    emit(rec)
    note("identities hold" if ok else f"fails: {rec.get('identity')} at {rec.get('assignment')}")
    return OK if ok else FAILED


def bundle_dot(bundle: dict, limit: int = 60) -> str:
    terms = load_terms(bundle["terms"])
    arrows = parse_arrows(bundle["pattern"])
    points = [terms[i] for i in bundle["points"]]
    lines = ["digraph certificate {", "  rankdir=LR;"]
    for i, p in enumerate(points, start=1):
        label = to_sexpr(p, limit).replace('"', '\\"')
        lines.append(f'  s{i} [label="s{i}: {label}"];')
    for i, a in enumerate(arrows, start=1):
        src, dst = (i, i + 1) if a.value == ">" else (i + 1, i)
        style = "solid" if a.solid else "dashed"
        lines.append(f'  s{src} -> s{dst} [style={style}, label="t{i}"];')
    for rec in bundle["edges"]:
        if rec["label"].startswith("pair:"):
            i, j = rec["label"][5:].split(",")
            if i != j:
                lines.append(f"  s{i} -> s{j} [style=dashed, constraint=false, color=gray];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args) -> int:
    bundle = json.loads(Path(args.certs).read_text())
    sys.stdout.write(bundle_dot(bundle, args.label_limit))
    return OK


def cmd_catalog(args) -> int:
    names = [args.condition] if args.condition else list(CONDITIONS)
    for name in names:
        n = args.n if args.n is not None else (2 if name == "pixley" else 5)
        try:
            pattern = catalog_path(name, n)
        except CatalogError as exc:
            if args.condition:
                raise
            note(f"{name}: {exc}")
            continue
        emit({"record": "pattern", "condition": name, "n": pattern.n, "arrows": str(pattern)})
        if args.identities:
            for ident in identity_set(name, pattern.n):
                emit({"record": "identity", "condition": name, "name": ident.name,
                      "lhs": to_sexpr(ident.lhs), "rhs": to_sexpr(ident.rhs)})
    return OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jonsson", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("free-gen", help="list the free algebra F_m of a finite algebra")
    q.add_argument("algebra")
    q.add_argument("--arity", type=int, choices=(2, 3), default=2)
    q.add_argument("--cap", type=int)
    q.set_defaults(func=cmd_free)

    q = sub.add_parser("find", help="realize a condition's pattern in a finite algebra")
    q.add_argument("algebra")
    q.add_argument("--condition", required=True, choices=CONDITIONS)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--n", type=int)
    g.add_argument("--min-n", type=int, default=8, help="search n = 2 .. MIN_N (default 8)")
    q.add_argument("--cap", type=int)
    q.set_defaults(func=cmd_find)

    q = sub.add_parser("directify", help="convert terms to directed terms with certificates")
    q.add_argument("--condition", required=True, choices=sorted(CONVERTERS))
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--terms", help="file with one term per line")
    g.add_argument("--from-model", help="algebra file; the terms are found in it first")
    q.add_argument("--min-n", type=int, default=8)
    q.add_argument("--cap", type=int)
    q.add_argument("--max-term-nodes", type=int)
    q.add_argument("--certs", help="write the certificate bundle (JSON) here")
    q.add_argument("--dot", help="write the output path as DOT here")
    q.set_defaults(func=cmd_directify)

    q = sub.add_parser("flip", help="realize -f, close it and flip its arrows to -g")
    q.add_argument("algebra")
    q.add_argument("-f", required=True, help="pattern, CONDITION,N or an arrow string")
    q.add_argument("-g", required=True)
    q.add_argument("--cap", type=int)
    q.add_argument("--dot")
    q.set_defaults(func=cmd_flip)

    q = sub.add_parser("verify", help="replay certificates or check identities in a model")
    q.add_argument("--certs")
    q.add_argument("--hypotheses", help="CONDITION,N: replay against these hypotheses")
    q.add_argument("--model")
    q.add_argument("--terms")
    q.add_argument("--identities", help="CONDITION,N")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("export-dot", help="DOT graph of a certificate bundle")
    q.add_argument("certs")
    q.add_argument("--label-limit", type=int, default=60)
    q.set_defaults(func=cmd_export_dot)

    q = sub.add_parser("catalog", help="print patterns and hypothesis identities")
    q.add_argument("condition", nargs="?", choices=CONDITIONS)
    q.add_argument("--n", type=int)
    q.add_argument("--identities", action="store_true")
    q.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except TermSizeError as exc:
        note(f"error: {exc}")
        return INCOMPLETE
    except (UsageError, CatalogError, AlgebraError, ParseError, OSError, json.JSONDecodeError) as exc:
        note(f"error: {exc}")
        return USAGE
    except (DirectifyError, ClosureError, PathError, TermError) as exc:
        note(f"error: {exc}")
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
