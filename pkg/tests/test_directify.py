import pytest

from jonsson.algebra import verify_model
from jonsson.catalog import catalog_path, identity_set, pattern_identities
from jonsson.directify import (DirectifyError, TermSizeError, alvin_to_directed, build_bundle,
                               directify, flip_step, gumm_to_directed_gumm, output_terms,
                               star_pairs, strengthen_star)
from jonsson.paths import symbolic_path
from jonsson.proofs import replay_bundle
from jonsson.terms import X, Y, Z, app, parse_term

from golden_n6 import expanded


def sym_terms(n):
    return [app(f"t{i}", X, Y, Z) for i in range(1, n)]


def replays(res, condition, n):
    bundle = build_bundle(res.path, res.calc)
    syms = [(f"t{i}", 3) for i in range(1, n)]
    return replay_bundle(bundle, identity_set(condition, n), syms)


def test_star_pairs():
    assert list(star_pairs(4)) == [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)]


def test_n2_passthrough():
    maj = parse_term("(m x y z)")
    assert directify([maj]).terms == [maj]


def test_star_on_short_paths_adds_only_basic_edges():
    for n in (3, 4):
        w, calc = symbolic_path(catalog_path("jonsson", n))
        star = strengthen_star(w, calc)
        assert star.points == w.points and [e.witness for e in star.steps] == w.terms()
        assert set(star.extra) == set(star_pairs(n))
        assert {e.rule for e in star.extra.values()} <= {"XS", "SZ", "XZ"}


def test_star_n6_matches_hand_worked_terms():
    g = expanded()
    w, calc = symbolic_path(catalog_path("jonsson", 6))
    star = strengthen_star(w, calc)
    for i in (3, 4, 5):
        assert star.step(i).witness is g[f"ts{i}"]
    for i, j in ((2, 4), (2, 5), (3, 5)):
        assert star.extra[i, j].witness is g[f"ts{i}{j}"]


def test_stage_terms_n6():
    g = expanded()
    res = directify(sym_terms(6))
    boot = res.stages["bootstrap"]
    assert [e.witness for e in boot.steps] == [g[f"td{i}"] for i in range(1, 6)]
    assert boot.extra[2, 5].witness is g["td25"] and boot.extra[3, 5].witness is g["td35"]
    assert res.terms == [g[f"tc{i}"] for i in range(1, 6)]
    assert list(res.stages) == ["input", "star", "bootstrap", "flip4"]


@pytest.mark.parametrize("n", range(2, 9))
def test_jonsson_counts_and_replay(n):
    res = directify(sym_terms(n))
    assert len(res.terms) == n - 1
    assert res.path.pattern == catalog_path("directed-jonsson", n)
    assert replays(res, "jonsson", n).ok


@pytest.mark.parametrize("n", range(2, 7))
def test_alvin(n):
    res = alvin_to_directed(sym_terms(n))
    assert len(res.terms) == n - 1
    assert res.path.pattern == catalog_path("directed-jonsson", n)
    assert any(note.endswith(": x") for note in res.notes)
    assert replays(res, "alvin", n).ok


@pytest.mark.parametrize("n", range(3, 8))
def test_gumm(n):
    res = gumm_to_directed_gumm(sym_terms(n))
    assert len(res.terms) == n - 1
    assert res.path.pattern == catalog_path("directed-gumm", n)
    assert not res.path.step(n - 1).solid
    assert replays(res, "gumm", n).ok


def test_flip_position_checked():
    w, calc = symbolic_path(catalog_path("jonsson", 4))
    with pytest.raises(DirectifyError):
        flip_step(w, calc, 4)


def test_wrong_shape_rejected():
    w, calc = symbolic_path(catalog_path("alvin", 4))
    with pytest.raises(DirectifyError):
        strengthen_star(w, calc)


def test_term_size_guard():
    with pytest.raises(TermSizeError):
        directify(sym_terms(6), max_nodes=20)


def test_bundle_outputs_round_trip():
    res = directify(sym_terms(5))
    bundle = build_bundle(res.path, res.calc, {"n": 5})
    assert output_terms(bundle) == res.terms
    assert bundle["manifest"]["inputs"] == {"n": 5}
    assert len(bundle["manifest"]["sha256"]) == 64


def test_concrete_terms_transport(lattice):
    # monotonicity forces s2 = z̄ for n = 3 in the two-element lattice
    terms = [parse_term("(join (meet x y) (join (meet x z) (meet y z)))"), Z]
    ok, _ = verify_model(lattice, {}, pattern_identities(catalog_path("jonsson", 3), terms))
    assert ok
    res = directify(terms)
    ok, cex = verify_model(lattice, {}, pattern_identities(catalog_path("directed-jonsson", 3), res.terms))
    assert ok, cex
    assert replay_bundle(build_bundle(res.path, res.calc)).ok
