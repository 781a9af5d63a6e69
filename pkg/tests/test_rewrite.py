"""Rule catalog, match/apply semantics, move traces, and the normalizer."""

import dataclasses
import random
from pathlib import Path

import pytest

from ocbord.diagram import graph_eq, syntactic_eq, to_port_graph
from ocbord.dsl import parse_file
from ocbord.invariants import invariants, profile_key
from ocbord.normalform import normal_form
from ocbord.rewrite import (
    MoveTrace,
    TraceError,
    apply_match,
    check_trace,
    find_matches,
    normalize,
    normalize_with_trace,
    parse_trace,
    read_trace,
    rules,
    trace_text,
    write_trace,
)

from helpers import random_term

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def test_catalog_shape():
    cat = rules()
    assert len(cat) >= 30
    groups = {r.group for r in cat.values()}
    assert {"symmFrobA", "commFrobC", "zipHom", "knowledge", "cozipDual",
            "cardy", "derived"} <= groups
    for rid, r in cat.items():
        assert r.id == rid and r.law
        assert r.lhs.source == r.rhs.source
        assert r.lhs.target == r.rhs.target


def test_rules_preserve_profile():
    for rid, r in sorted(rules().items()):
        assert profile_key(invariants(r.lhs)) \
            == profile_key(invariants(r.rhs)), rid


def test_every_rule_round_trips():
    for rid, r in sorted(rules().items()):
        for rev in (False, True):
            host = to_port_graph(r.side(rev))
            other = to_port_graph(r.side(not rev))
            ms = find_matches(host, rid, rev)
            assert ms, f"{rid} does not match its own side (rev={rev})"
            hits = [m for m in ms
                    if graph_eq(apply_match(host, m), other)]
            assert hits, f"{rid} (rev={rev}) never rewrites to the far side"
            out = apply_match(host, hits[0])
            back = [m for m in find_matches(out, rid, not rev)
                    if graph_eq(apply_match(out, m), host)]
            assert back, f"{rid} (rev={rev}) cannot be undone"


def test_find_matches_is_deterministic_and_pinnable():
    g = to_port_graph(parse_file(CORPUS / "figure1.ocd"))
    ms1 = find_matches(g, "assoc_A", False)
    ms2 = find_matches(g, "assoc_A", False)
    assert ms1 == ms2 == sorted(ms1, key=lambda m: (m.nodes, m.src_prod,
                                                    m.tgt_cons))
    if ms1:
        pinned = find_matches(g, "assoc_A", False, at=ms1[0].nodes)
        assert pinned and all(m.nodes == ms1[0].nodes for m in pinned)


def test_handle_is_not_a_frobenius_redex():
    # both legs of the pair close onto each other, so the match frontier
    # would sit on matched nodes; convexity forbids it
    g = to_port_graph(parse_file(CORPUS / "torus.ocd"))
    assert find_matches(g, "frobL_C", False) == []
    assert find_matches(g, "frobR_C", False) == []


def test_apply_match_leaves_host_untouched():
    g = to_port_graph(parse_file(CORPUS / "figure1.ocd"))
    snapshot = sorted(g.nodes.items())
    wires = sorted(g.wires())
    ms = next(m for rid in sorted(rules()) for rev in (False, True)
              for m in find_matches(g, rid, rev))
    h = apply_match(g, ms)
    assert h is not g
    g.validate()
    assert sorted(g.nodes.items()) == snapshot
    assert sorted(g.wires()) == wires


def test_random_rewrites_preserve_profile():
    rng = random.Random(41)
    rule_ids = sorted(rules())
    for _ in range(25):
        t = random_term(rng, max_gens=14, colors=("*", "a"),
                        connected=False)
        g = to_port_graph(t)
        base = profile_key(invariants(g))
        for _ in range(30):
            rid = rng.choice(rule_ids)
            rev = rng.random() < 0.5
            ms = find_matches(g, rid, rev) or find_matches(g, rid, not rev)
            if ms:
                g = apply_match(g, rng.choice(ms))
        g.validate()
        assert profile_key(invariants(g)) == base


def test_normalize_agrees_with_normal_form():
    rng = random.Random(42)
    for _ in range(80):
        t = random_term(rng, max_gens=20, colors=("*", "a", "b"),
                        connected=False)
        nf, tr = normalize_with_trace(t)
        assert syntactic_eq(nf, normal_form(t))
        assert check_trace(tr)
        assert syntactic_eq(normalize(t), nf)


def test_normalize_fixpoint_needs_no_moves():
    rng = random.Random(43)
    for _ in range(20):
        t = random_term(rng, max_gens=15)
        nf, _ = normalize_with_trace(t)
        nf2, tr2 = normalize_with_trace(nf)
        assert syntactic_eq(nf2, nf)
        assert tr2.moves == ()


def test_trace_text_round_trip():
    t = parse_file(CORPUS / "figure1.ocd")
    _, tr = normalize_with_trace(t)
    assert len(tr.moves) > 0
    text = trace_text(tr)
    lines = text.splitlines()
    assert lines[0] == "ocbord-trace 1"
    assert "initial-begin" in lines and "final-begin" in lines
    back = parse_trace(text)
    assert trace_text(back) == text
    assert check_trace(back)


def test_trace_file_round_trip(tmp_path):
    t = parse_file(CORPUS / "mixed_genus.ocd")
    _, tr = normalize_with_trace(t)
    p = tmp_path / "moves.log"
    write_trace(tr, p)
    back = read_trace(p)
    assert trace_text(back) == trace_text(tr)
    assert check_trace(back)


def test_tampered_rule_name_is_rejected():
    _, tr = normalize_with_trace(parse_file(CORPUS / "figure1.ocd"))
    m0 = tr.moves[0]
    wrong = "assoc_A" if m0.rule != "assoc_A" else "assoc_C"
    bad = MoveTrace(tr.initial,
                    (dataclasses.replace(m0, rule=wrong),) + tr.moves[1:],
                    tr.final)
    with pytest.raises(TraceError):
        check_trace(bad)


def test_dropped_move_is_rejected():
    _, tr = normalize_with_trace(parse_file(CORPUS / "figure1.ocd"))
    bad = MoveTrace(tr.initial, tr.moves[1:], tr.final)
    with pytest.raises(TraceError):
        check_trace(bad)


def test_wrong_final_is_rejected():
    _, tr = normalize_with_trace(parse_file(CORPUS / "figure1.ocd"))
    bad = MoveTrace(tr.initial, tr.moves, tr.initial)
    with pytest.raises(TraceError):
        check_trace(bad)


def test_malformed_trace_text_is_rejected():
    with pytest.raises(TraceError):
        parse_trace("not-a-trace 9\n")
    _, tr = normalize_with_trace(parse_file(CORPUS / "strip_hole.ocd"))
    text = trace_text(tr)
    with pytest.raises(TraceError):
        parse_trace(text.replace("ocbord-trace 1", "ocbord-trace 2", 1))
