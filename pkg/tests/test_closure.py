import pytest

from jonsson.algebra import generate_free, verify_model
from jonsson.catalog import Arrow, PatternPath, catalog_path, pattern_identities
from jonsson.closure import (ClosureError, ClosureReport, closure_confirmed, dashed_closure,
                             flip_arrows, iterate_pk, realize_variant)
from jonsson.edges import ModelCalculus, model_edges
from jonsson.paths import realize_in_model, symbolic_path
from jonsson.terms import X, Z, to_sexpr

from conftest import idempotent_ternary_algebras


def model(alg):
    F2, F3 = generate_free(alg, 2), generate_free(alg, 3)
    edges, complete = model_edges(F2, F3)
    return F2, F3, edges, ModelCalculus(alg, F2, F3)


def all_pairs(n):
    return {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}


def test_symbolic_mode_rejected():
    w, calc = symbolic_path(catalog_path("jonsson", 3))
    with pytest.raises(ClosureError, match="finite"):
        dashed_closure(w, calc)


def test_majority_n2(majority):
    F2, F3, edges, calc = model(majority)
    w = realize_in_model(catalog_path("jonsson", 2), edges, F2)
    report = ClosureReport()
    one = iterate_pk(w, calc, 1, report)
    assert one.points == w.points
    closed = dashed_closure(w, calc, report)
    assert set(closed.extra) == {(1, 2)}
    assert (closed.extra[1, 2].tail, closed.extra[1, 2].head) == (X, Z)
    assert closure_confirmed(closed, F2, edges) == []
    # the second iterate repeats the first
    assert report.iterations[2] == (2, 1)
    assert report.bound == len(F2) + 1


def test_last_point_stays_z(lattice):
    F2, F3, edges, calc = model(lattice)
    w = realize_in_model(catalog_path("jonsson", 4), edges, F2)
    out = iterate_pk(w, calc, 4)
    assert out.point(4) is Z and out.point(1) is X


def test_pixley_closure_has_x_to_z(pixley):
    F2, F3, edges, calc = model(pixley)
    w = realize_in_model(catalog_path("pixley"), edges, F2)
    closed = dashed_closure(w, calc)
    e = closed.extra[1, 2]
    assert (e.tail, e.head) == (X, Z)
    assert closure_confirmed(closed, F2, edges) == []


def test_flip_without_changes_is_identity(lattice):
    F2, F3, edges, calc = model(lattice)
    w = dashed_closure(realize_in_model(catalog_path("jonsson", 3), edges, F2), calc)
    assert flip_arrows(w, w.pattern, calc) is w


def test_flip_rejects_bad_targets(lattice):
    F2, F3, edges, calc = model(lattice)
    w = dashed_closure(realize_in_model(catalog_path("jonsson", 3), edges, F2), calc)
    with pytest.raises(ClosureError):
        flip_arrows(w, PatternPath((Arrow.LEFT, Arrow.LEFT)), calc)
    with pytest.raises(ClosureError):
        flip_arrows(w, PatternPath((Arrow.RIGHT, Arrow.LEFT_DASHED)), calc)
    with pytest.raises(ClosureError):
        flip_arrows(w, catalog_path("jonsson", 4), calc)


def test_flip_needs_closure(lattice):
    F2, F3, edges, calc = model(lattice)
    w = realize_in_model(catalog_path("jonsson", 3), edges, F2)
    with pytest.raises(ClosureError, match="missing"):
        flip_arrows(w, catalog_path("directed-jonsson", 3), calc)


def test_realize_variant_examples(majority, lattice, pixley):
    res = realize_variant(majority, catalog_path("jonsson", 2), catalog_path("directed-jonsson", 2))
    assert [to_sexpr(t) for t in res.terms] == ["(m x y z)"] and res.verified
    res = realize_variant(lattice, catalog_path("jonsson", 3), catalog_path("directed-jonsson", 3))
    assert res.verified and res.path.pattern == catalog_path("directed-jonsson", 3)
    res = realize_variant(pixley, catalog_path("pixley"), catalog_path("pixley"))
    assert [to_sexpr(t) for t in res.terms] == ["(p x y z)"] and res.verified


def test_alvin_heads_to_directed(pixley):
    for n in (3, 4, 5):
        f, g = catalog_path("alvin-heads", n), catalog_path("directed-jonsson", n)
        res = realize_variant(pixley, f, g)
        assert res.verified and res.path.pattern == g
        assert len(res.path.points) == n


def test_defective_gumm_to_two_headed(majority):
    f, g = catalog_path("defective-gumm", 6), catalog_path("two-headed-directed-gumm", 6)
    res = realize_variant(majority, f, g)
    assert res.verified and res.path.pattern == g


def test_non_idempotent_rejected():
    from jonsson.algebra import FiniteAlgebra
    neg = FiniteAlgebra.from_function("neg", 2, n=(1, lambda a: 1 - a))
    with pytest.raises(ClosureError, match="idempotent"):
        realize_variant(neg, catalog_path("jonsson", 2), catalog_path("directed-jonsson", 2))


@pytest.mark.parametrize("alg", idempotent_ternary_algebras()[::5], ids=lambda a: a.name)
def test_closure_preserved_after_flip(alg):
    F2, F3, edges, calc = model(alg)
    for n in (3, 4, 5):
        w = realize_in_model(catalog_path("jonsson", n), edges, F2)
        if w is None:
            continue
        closed = dashed_closure(w, calc)
        assert set(closed.extra) >= all_pairs(n) - {(i, i + 1) for i in range(1, n) if w.arrow(i) is Arrow.RIGHT}
        out = flip_arrows(closed, catalog_path("directed-jonsson", n), calc)
        assert closure_confirmed(out, F2, edges) == []
        ok, cex = verify_model(alg, {}, pattern_identities(out.pattern, out.terms()))
        assert ok, cex
