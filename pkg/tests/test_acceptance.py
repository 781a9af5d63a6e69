"""Acceptance gate: one test per shipped claim, exact tolerances.

Each test prints a single ``criterion N: PASS`` line (visible with -s);
the pytest verdict per test is the pass/fail line for that criterion.
"""

import random
import time
from pathlib import Path

from ocbord.diagram import compose, syntactic_eq
from ocbord.dsl import parse_file
from ocbord.invariants import equivalent, invariants, profile_key
from ocbord.normalform import normal_form, wrap
from ocbord.rewrite import check_trace, normalize_with_trace, rules
from ocbord.tqft import (builtin_groupoid_example, builtin_matrix_example,
                         check_axioms, evaluate)

from cw_oracle import cw_profile
from helpers import (mutate_algebra, perm_term, perturb, random_mutant,
                     random_term, recolor)

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def test_criterion_1_figure_one_exact():
    t0 = time.perf_counter()
    inv = invariants(parse_file(CORPUS / "figure1.ocd"))
    enc = lambda segs: tuple(1 if s.is_interval else 0 for s in segs)
    assert enc(inv.source) == (1, 0, 1, 1, 1)
    assert enc(inv.target) == (0, 1, 1, 0, 0)
    assert inv.sigma_str() == "(2 5 6)(3 4)"
    dt = time.perf_counter() - t0
    assert dt < 1.0
    print(f"criterion 1: PASS (objects and sigma exact, {dt:.3f}s)")


def test_criterion_2_relation_soundness():
    t0 = time.perf_counter()
    m2 = builtin_matrix_example(2)
    m3 = builtin_matrix_example(3)
    cat = rules()
    assert len(cat) >= 30
    for rid, r in sorted(cat.items()):
        assert profile_key(invariants(r.lhs)) \
            == profile_key(invariants(r.rhs)), rid
        l, h = recolor(r.lhs), recolor(r.rhs)
        assert evaluate(l, m2) == evaluate(h, m2), f"{rid} under matrix2"
        assert evaluate(l, m3) == evaluate(h, m3), f"{rid} under matrix3"
    dt = time.perf_counter() - t0
    assert dt < 30.0
    print(f"criterion 2: PASS ({len(cat)} rules, profile and both "
          f"evaluations exact, {dt:.1f}s)")


def test_criterion_3_normal_form_at_desk_scale():
    t0 = time.perf_counter()
    m2 = builtin_matrix_example(2)
    rng = random.Random(314159)
    mixed = 0
    for i in range(500):
        t = random_term(rng, max_gens=25, max_width=6)
        segs = set()
        for row in t.slices:
            for f in row:
                segs.update(s.is_interval for s in f.source + f.target)
        mixed += segs == {True, False}
        nf, tr = normalize_with_trace(t)
        assert check_trace(tr), i
        assert syntactic_eq(nf, normal_form(t)), i
        assert evaluate(t, m2) == evaluate(nf, m2), i
    dt = time.perf_counter() - t0
    assert dt < 300.0
    assert mixed > 100          # the sample genuinely mixes both sectors
    print(f"criterion 3: PASS (500/500 diagrams, {mixed} mixed-sector, "
          f"{dt:.1f}s)")


def test_criterion_4_equivalence_completeness():
    rng = random.Random(271828)
    t0 = time.perf_counter()
    for i in range(200):
        t = random_term(rng, max_gens=14, colors=("*", "a"))
        m = random_mutant(rng, t, rng.randint(1, 10))
        assert equivalent(t, m), f"mutant pair {i}"
    for i in range(200):
        t = random_term(rng, max_gens=14, colors=("*", "a"))
        p = perturb(rng, t)
        assert not equivalent(t, p), f"perturbed pair {i}"
    dt = time.perf_counter() - t0
    print(f"criterion 4: PASS (200/200 equivalent, 200/200 rejected, "
          f"{dt:.1f}s)")


def test_criterion_5_euler_characteristic_oracle():
    t0 = time.perf_counter()
    files = sorted(CORPUS.glob("*.ocd"))
    assert files
    for f in files:
        t = parse_file(f)
        mine = sorted((c.euler, c.boundary_circles)
                      for c in invariants(t).components)
        assert mine == cw_profile(t), f.name
    rng = random.Random(161803)
    for i in range(1000):
        t = random_term(rng, max_gens=20, colors=("*", "a", "b"),
                        connected=False)
        mine = sorted((c.euler, c.boundary_circles)
                      for c in invariants(t).components)
        assert mine == cw_profile(t), i
    dt = time.perf_counter() - t0
    print(f"criterion 5: PASS (chi matches on {len(files)} corpus files "
          f"and 1000 random diagrams, {dt:.1f}s)")


def test_criterion_6_axiom_checker():
    t0 = time.perf_counter()
    for n in (1, 2, 3):
        assert check_axioms(builtin_matrix_example(n)).ok, f"matrix{n}"
    assert check_axioms(builtin_groupoid_example()).ok
    rng = random.Random(577215)
    killed = 0
    for base in (builtin_matrix_example(2),
                 builtin_groupoid_example("pair_z2")):
        for _ in range(10):
            mut, key, rc = mutate_algebra(rng, base)
            rep = check_axioms(mut)
            assert not rep.ok, (key, rc)
            w = rep.failures[0]
            assert w.basis_label and w.lhs_column != w.rhs_column
            killed += 1
    assert killed == 20
    dt = time.perf_counter() - t0
    print(f"criterion 6: PASS (matrix 1..3 and groupoid verified, "
          f"20/20 mutations killed with witnesses, {dt:.1f}s)")


def test_criterion_7_permutation_invariances():
    t0 = time.perf_counter()
    rng = random.Random(20260814)
    kept = tgt_checked = cyc_checked = 0
    while kept < 50:
        t = random_term(rng, max_gens=25, max_width=6)
        w, _ = wrap(t)
        nf = normal_form(w)
        m = len(nf.target)
        cycles = [c for c in invariants(nf).cycles if len(c) >= 2]
        if m < 2 and not cycles:
            continue
        kept += 1
        if m > 1:
            pi = list(range(m))
            rng.shuffle(pi)
            p = perm_term(nf.target, tuple(pi))
            assert equivalent(compose(nf, p), nf)
            tgt_checked += 1
        n = len(nf.source)
        for cyc in cycles:
            pi = list(range(n))
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                pi[a - 1] = b - 1
            p = perm_term(nf.source, tuple(pi))
            assert equivalent(compose(p, nf), nf)
            cyc_checked += 1
    dt = time.perf_counter() - t0
    assert tgt_checked >= 15 and cyc_checked >= 15
    print(f"criterion 7: PASS (50 normal forms, {tgt_checked} target "
          f"permutations, {cyc_checked} source cycles, {dt:.1f}s)")
