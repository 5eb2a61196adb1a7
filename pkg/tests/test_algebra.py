import itertools

import pytest
from hypothesis import given, settings, strategies as st

from jonsson.algebra import (AlgebraError, FiniteAlgebra, generate_free, parse_algebra,
                             verify_model)
from jonsson.catalog import catalog_path, pattern_identities
from jonsson.terms import Identity, X, parse_term

from oracles import boolean_universe, clone_closure, evaluate, inputs


def tables_of(alg):
    return {name: (op.arity, [int(v) for v in op.table]) for name, op in alg.ops.items()}


def test_parse_and_text_round_trip(lattice):
    again = parse_algebra(lattice.to_text())
    assert again.size == 2 and sorted(again.ops) == ["join", "meet"]
    assert again.eval_term(parse_term("(join x (meet y z))"), (0, 1, 1)) == 1


@pytest.mark.parametrize("text", [
    "size 2\nop f 1\n0 1\n",
    "algebra a\nsize 2\nop f 2\n0 1 1\n",
    "algebra a\nsize 2\nop f 1\n0 2\n",
    "algebra a\nop f 1\n0 1\n",
    "algebra a\nsize 2\nop x 1\n0 1\n",
])
def test_parse_rejects_bad_files(text):
    with pytest.raises(AlgebraError):
        parse_algebra(text)


def test_evaluation_matches_reference(pixley):
    ops = tables_of(pixley)
    t = parse_term("(p x (p x y z) z)")
    expr = ("p", "x", ("p", "x", "y", "z"), "z")
    for a, b, c in itertools.product(range(2), repeat=3):
        assert pixley.eval_term(t, (a, b, c)) == evaluate(expr, dict(x=a, y=b, z=c), ops)


@pytest.mark.parametrize("name,m,size", [
    ("lattice", 2, 4), ("lattice", 3, 18), ("majority", 2, 2), ("majority", 3, 4),
    ("pixley", 2, 2), ("pixley", 3, 8),
])
def test_free_sizes_match_oracle(name, m, size, request):
    alg = request.getfixturevalue(name)
    F = generate_free(alg, m)
    oracle = clone_closure(2, m, tables_of(alg))
    assert oracle <= boolean_universe(m)
    assert {e.table for e in F.elements} == oracle
    assert len(F) == size and F.complete


def test_witnesses_evaluate_to_their_tables(lattice):
    F = generate_free(lattice, 3)
    for e in F.elements:
        assert lattice.tabulate(e.witness, 3) == e.table
    assert [str(F.elements[i].witness) for i in range(3)] == ["x", "y", "z"]


def test_generation_is_deterministic(lattice):
    a = generate_free(lattice, 3)
    b = generate_free(lattice, 3)
    assert [(e.table, e.witness) for e in a.elements] == [(e.table, e.witness) for e in b.elements]


def test_cap_marks_incomplete(lattice):
    F = generate_free(lattice, 2, cap=2)
    assert not F.complete and len(F) == 2
    with pytest.raises(AlgebraError):
        generate_free(lattice, 2, cap=1)


ops_strategy = st.lists(
    st.tuples(st.integers(1, 3), st.integers(0, 2 ** 27)),
    min_size=1, max_size=2)


@settings(max_examples=60, deadline=None)
@given(ops_strategy)
def test_random_boolean_clones_match_oracle(op_seeds):
    tables = {}
    for i, (arity, seed) in enumerate(op_seeds):
        tables[f"o{i}"] = (arity, [(seed >> j) & 1 for j in range(2 ** arity)])
    alg = FiniteAlgebra.from_tables("rand", 2, **tables)
    F = generate_free(alg, 2)
    assert {e.table for e in F.elements} == clone_closure(2, 2, tables)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 26), min_size=1, max_size=2))
def test_three_element_unary_clones_match_oracle(seeds):
    tables = {f"u{i}": (1, [(s // 3 ** j) % 3 for j in range(3)]) for i, s in enumerate(seeds)}
    alg = FiniteAlgebra.from_tables("r3", 3, **tables)
    F = generate_free(alg, 2)
    assert {e.table for e in F.elements} == clone_closure(3, 2, tables)


def test_three_element_chain_matches_oracle():
    tables = {"meet": (2, [min(a, b) for a, b in inputs(3, 2)]),
              "join": (2, [max(a, b) for a, b in inputs(3, 2)])}
    alg = FiniteAlgebra.from_tables("chain3", 3, **tables)
    for m in (2, 3):
        F = generate_free(alg, m)
        assert {e.table for e in F.elements} == clone_closure(3, m, tables)


def test_verify_model_reports_counterexample(lattice, majority):
    ident = pattern_identities(catalog_path("pixley"), [parse_term("(m x y z)")])
    ok, cex = verify_model(majority, {}, ident)
    assert not ok
    bad, env = cex
    assert set(env) == {"x", "y", "z"}
    ok, _ = verify_model(lattice, {"t1": parse_term("(join (meet x y) (join (meet x z) (meet y z)))")},
                         pattern_identities(catalog_path("jonsson", 2)))
    assert ok
    with pytest.raises(AlgebraError):
        verify_model(lattice, {}, [Identity(parse_term("(q x)"), X)])


def test_idempotence_check(lattice):
    assert lattice.check_idempotent() == (True, None)
    neg = FiniteAlgebra.from_function("neg", 2, n=(1, lambda a: 1 - a))
    assert neg.check_idempotent()[0] is False
