"""Exact-rational evaluation and the algebra axiom checker."""

import random
from fractions import Fraction
from pathlib import Path

import pytest

from ocbord.diagram import (Cross, DiagramTerm, OcbordError, Seg,
                            identity_term, tensor)
from ocbord.dsl import parse, parse_file
from ocbord.tqft import (
    BUILTIN_ALGEBRAS,
    EVAL_DIM_CAP,
    Groupoid,
    KFA,
    LinearMap,
    builtin_algebra,
    builtin_groupoid_example,
    builtin_matrix_example,
    check_axioms,
    evaluate,
    groupoid_algebra,
    load_kfa,
    save_kfa,
)

from helpers import mutate_algebra, random_term, recolor

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


# ---------------------------------------------------------------------------
# LinearMap


def test_linear_map_basics():
    m = LinearMap.from_rows([[1, 2], [0, Fraction(1, 3)]])
    assert m.entry(1, 1) == Fraction(1, 3)
    assert m.to_rows() == [[1, 2], [0, Fraction(1, 3)]]
    i2 = LinearMap.identity(2)
    assert i2 @ m == m == m @ i2
    with pytest.raises(ValueError):
        LinearMap(1, 1, {(1, 0): 1})
    with pytest.raises(ValueError):
        i2 @ LinearMap.identity(3)


def test_linear_map_tensor_is_left_factor_major():
    a = LinearMap.from_rows([[2]])
    b = LinearMap.from_rows([[1, 0], [0, 3]])
    ab = a.tensor(b)
    assert ab.rows == 2 and ab.cols == 2
    assert ab.to_rows() == [[2, 0], [0, 6]]
    e01 = LinearMap(2, 1, {(1, 0): 1})
    assert (e01.tensor(e01)).entry(3, 0) == 1


# ---------------------------------------------------------------------------
# Evaluation


def test_identity_and_cross_evaluate_to_permutations():
    alg = builtin_matrix_example(2)
    seg = Seg.I("*", "*")
    assert evaluate(identity_term((seg,)), alg) == LinearMap.identity(4)
    swap = DiagramTerm((seg, Seg.O()), ((Cross(seg, Seg.O()),),))
    m = evaluate(swap, alg)
    assert m.rows == m.cols == 4
    assert m @ evaluate(DiagramTerm((Seg.O(), seg),
                                    ((Cross(Seg.O(), seg),),)), alg) \
        == LinearMap.identity(4)


def test_functorial_in_slicing():
    alg = builtin_matrix_example(2)
    rng = random.Random(51)
    for _ in range(20):
        t = random_term(rng, max_gens=12, max_width=5, connected=False)
        if len(t.slices) < 2:
            continue
        cut = rng.randrange(1, len(t.slices))
        top = DiagramTerm(t.source, t.slices[:cut])
        bot = DiagramTerm(top.target, t.slices[cut:])
        assert evaluate(t, alg) == evaluate(bot, alg) @ evaluate(top, alg)


def test_monoidal_in_tensor():
    alg = builtin_matrix_example(2)
    rng = random.Random(52)
    for _ in range(12):
        a = random_term(rng, max_gens=6, max_width=3, connected=False)
        b = random_term(rng, max_gens=6, max_width=3, connected=False)
        assert evaluate(tensor(a, b), alg) \
            == evaluate(a, alg).tensor(evaluate(b, alg))


def test_open_zigzag_is_identity():
    t = parse_file(CORPUS / "zigzag.ocd")
    alg = builtin_groupoid_example("pair_z2")
    d = alg.dims[("A", "a", "b")]
    assert evaluate(t, alg) == LinearMap.identity(d)
    mono = recolor(t)
    assert evaluate(mono, builtin_matrix_example(3)) == LinearMap.identity(9)


def test_closed_zigzag_is_identity():
    text = ("source O\n"
            "id:O | eta_C\n"
            "id:O | Delta_C\n"
            "mu_C | id:O\n"
            "eps_C | id:O\n")
    t = parse(text)
    for name in ("matrix2", "groupoid-pair_z2", "groupoid-s3"):
        alg = builtin_algebra(name)
        assert evaluate(t, alg) == LinearMap.identity(alg.dims["C"]), name


def test_zip_lands_in_the_centre():
    # zip;mu = crossed zip;mu for every builtin (the knowledge axiom,
    # exercised through the evaluator rather than the checker)
    lhs = parse("source O, I\nzip | id:I\nmu_A\n")
    rhs = parse("source O, I\ncross(O, I)\nid:I | zip\nmu_A\n")
    for name in BUILTIN_ALGEBRAS:
        alg = builtin_algebra(name)
        if alg.colors != ("*",):
            continue
        assert evaluate(lhs, alg) == evaluate(rhs, alg), name


def test_dimension_cap_is_enforced():
    alg = builtin_matrix_example(3)
    t = parse_file(CORPUS / "figure1.ocd")
    # four interval factors of dimension nine each exceed the cap
    assert 9 ** 4 > EVAL_DIM_CAP
    with pytest.raises(OcbordError):
        evaluate(t, alg)


def test_colour_mismatch_is_an_error():
    t = parse("colors a, b\nsource I[a,b]\nid:I[a,b]\n")
    with pytest.raises(OcbordError):
        evaluate(t, builtin_matrix_example(2))


# ---------------------------------------------------------------------------
# Axioms


def test_builtin_algebras_pass_axioms():
    for name in BUILTIN_ALGEBRAS:
        rep = check_axioms(builtin_algebra(name))
        assert rep.ok and rep.checked > 0, name


def test_single_entry_mutations_are_killed():
    rng = random.Random(53)
    for base in (builtin_matrix_example(2),
                 builtin_groupoid_example("pair_z2")):
        for _ in range(10):
            mut, key, rc = mutate_algebra(rng, base)
            rep = check_axioms(mut)
            assert not rep.ok, (key, rc)
            w = rep.failures[0]
            assert w.lhs_column != w.rhs_column
            assert w.basis_label


def test_axiom_report_renders():
    rep = check_axioms(builtin_matrix_example(1))
    assert "hold" in str(rep)
    rng = random.Random(54)
    mut, _, _ = mutate_algebra(rng, builtin_matrix_example(2))
    bad = check_axioms(mut)
    assert "fail" in str(bad) and str(bad.failures[0])


# ---------------------------------------------------------------------------
# Groupoids


def test_custom_groupoid_round_trip():
    # the pair groupoid on two objects: all homs are singletons
    objs = ("x", "y")
    ms = {"ix": ("x", "x"), "iy": ("y", "y"),
          "f": ("x", "y"), "g": ("y", "x")}
    comp = {}
    for a, (asrc, atgt) in ms.items():
        for b, (bsrc, btgt) in ms.items():
            if btgt == asrc:
                comp[(a, b)] = next(c for c, (cs, ct) in ms.items()
                                    if (cs, ct) == (bsrc, atgt))
    gpd = Groupoid(objs, ms, comp)
    alg = groupoid_algebra(gpd)
    assert check_axioms(alg).ok
    assert alg.dims[("A", "x", "y")] == 1


def test_invalid_groupoid_rejected():
    with pytest.raises(OcbordError):
        Groupoid(("x",), {"e": ("x", "x"), "f": ("x", "x")},
                 {("e", "e"): "e", ("e", "f"): "f",
                  ("f", "e"): "f", ("f", "f"): "f"})


# ---------------------------------------------------------------------------
# File format


def test_kfa_round_trip(tmp_path):
    for name in ("matrix2", "groupoid-pair_z2", "groupoid-two_comps"):
        alg = builtin_algebra(name)
        p = tmp_path / f"{name}.kfa"
        save_kfa(alg, p)
        back = load_kfa(p)
        assert back.colors == alg.colors
        assert back.dims == alg.dims
        assert back.maps == alg.maps


def test_kfa_load_errors(tmp_path):
    p = tmp_path / "bad.kfa"
    p.write_text("not json at all {", encoding="utf-8")
    with pytest.raises(OcbordError):
        load_kfa(p)
    p.write_text('{"format": "other"}', encoding="utf-8")
    with pytest.raises(OcbordError):
        load_kfa(p)
    import json
    alg = builtin_matrix_example(1)
    save_kfa(alg, p)
    doc = json.loads(p.read_text(encoding="utf-8"))
    del doc["maps"]["mu_C"]
    p.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(OcbordError):
        load_kfa(p)


def test_unknown_builtin_rejected():
    with pytest.raises(OcbordError):
        builtin_algebra("matrixx")
