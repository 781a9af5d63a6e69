"""Generator signatures, term typing, and the port graph layer."""

import random

import pytest

from ocbord.diagram import (
    Cross,
    DiagramTerm,
    Gen,
    Id,
    OcbordError,
    PortGraph,
    Seg,
    TypingError,
    canonical_key,
    canonical_relabel,
    compose,
    from_port_graph,
    gen_term,
    graph_eq,
    identity_term,
    syntactic_eq,
    tensor,
    to_port_graph,
)

from helpers import random_term


def I(a="*", b="*"):
    return Seg.I(a, b)


O = Seg.O()


def test_generator_signatures():
    assert Gen("mu_A", ("a", "b", "c")).source == (I("a", "b"), I("b", "c"))
    assert Gen("mu_A", ("a", "b", "c")).target == (I("a", "c"),)
    assert Gen("Delta_A", ("a", "b", "c")).source == (I("a", "c"),)
    assert Gen("Delta_A", ("a", "b", "c")).target == (I("a", "b"), I("b", "c"))
    assert Gen("eta_A", ("a",)).source == ()
    assert Gen("eta_A", ("a",)).target == (I("a", "a"),)
    assert Gen("eps_A", ("a",)).source == (I("a", "a"),)
    assert Gen("mu_C").source == (O, O) and Gen("mu_C").target == (O,)
    assert Gen("Delta_C").target == (O, O)
    # zip turns a circle state into an interval state, cozip the reverse
    assert Gen("zip", ("a",)).source == (O,)
    assert Gen("zip", ("a",)).target == (I("a", "a"),)
    assert Gen("cozip", ("a",)).source == (I("a", "a"),)
    assert Gen("cozip", ("a",)).target == (O,)


def test_generator_arity_checked():
    with pytest.raises(ValueError):
        Gen("mu_A", ("a", "b"))
    with pytest.raises(ValueError):
        Gen("frobnicate")
    with pytest.raises(ValueError):
        Gen("zip")


def test_cross_and_id():
    c = Cross(I("a", "b"), O)
    assert c.source == (I("a", "b"), O)
    assert c.target == (O, I("a", "b"))
    assert Id(O).source == (O,) == Id(O).target


def test_compose_typing():
    eta = gen_term(Gen("eta_A", ("a",)))
    eps_a = gen_term(Gen("eps_A", ("a",)))
    eps_b = gen_term(Gen("eps_A", ("b",)))
    disc = compose(eta, eps_a)
    assert disc.source == () and disc.target == ()
    with pytest.raises(TypingError):
        compose(eta, eps_b)
    with pytest.raises(TypingError):
        compose(eta, gen_term(Gen("eps_C")))


def test_tensor_concatenates():
    t = tensor(gen_term(Gen("mu_C")), identity_term((I("a", "b"),)))
    assert t.source == (O, O, I("a", "b"))
    assert t.target == (O, I("a", "b"))


def test_validate_reports_bad_slice():
    bad = DiagramTerm((O,), ((Gen("mu_C"),),))
    with pytest.raises(TypingError):
        bad.validate()


def _relabelled(g, rng):
    ids = sorted(g.nodes)
    perm = ids[:]
    rng.shuffle(perm)
    pi = dict(zip(ids, perm))

    def ep(e):
        if e[0] in ("out", "in"):
            return (e[0], pi[e[1]], e[2])
        return e

    h = PortGraph(g.source, g.target)
    for nid in perm:
        inv = {v: k for k, v in pi.items()}
        h.add_node(g.nodes[inv[nid]], nid=nid)
    for prod, cons in g.wires():
        h.wire(ep(prod), ep(cons))
    h.validate()
    return h


def test_graph_eq_ignores_node_ids():
    rng = random.Random(3)
    for _ in range(40):
        t = random_term(rng, max_gens=12, colors=("*", "a"), connected=False)
        g = to_port_graph(t)
        h = _relabelled(g, rng)
        assert graph_eq(g, h)
        assert canonical_key(g) == canonical_key(h)
        assert syntactic_eq(from_port_graph(g), from_port_graph(h))


def test_round_trip_term_graph():
    rng = random.Random(4)
    for _ in range(60):
        t = random_term(rng, max_gens=14, colors=("*", "a", "b"),
                        connected=False)
        g = to_port_graph(t)
        back = from_port_graph(g)
        assert graph_eq(g, to_port_graph(back))
        assert back.source == t.source and back.target == t.target


def test_from_port_graph_is_canonical():
    # the layout only depends on the graph, not the id assignment
    rng = random.Random(5)
    t = random_term(rng, max_gens=18)
    g = to_port_graph(t)
    assert syntactic_eq(from_port_graph(g),
                        from_port_graph(canonical_relabel(g)))


def test_graph_eq_detects_difference():
    zipzip = compose(gen_term(Gen("zip", ("a",))),
                     gen_term(Gen("cozip", ("a",))))
    plain = identity_term((O,))
    assert not graph_eq(to_port_graph(zipzip), to_port_graph(plain))


def test_validate_rejects_dangling_port():
    g = PortGraph((O,), (O,))
    g.add_node(Gen("Delta_C"))
    g.wire(("src", 0), ("in", 0, 0))
    g.wire(("out", 0, 0), ("tgt", 0))
    # out port 1 left dangling
    with pytest.raises(OcbordError):
        g.validate()


def test_syntactic_eq_is_strict_on_slicing():
    a = tensor(gen_term(Gen("eta_C")), gen_term(Gen("eta_C")))
    b = compose(gen_term(Gen("eta_C")),
                tensor(identity_term((O,)), gen_term(Gen("eta_C"))))
    assert a.source == b.source and a.target == b.target
    assert graph_eq(to_port_graph(a), to_port_graph(b))
    assert not syntactic_eq(a, b)
    assert syntactic_eq(from_port_graph(to_port_graph(a)),
                        from_port_graph(to_port_graph(b)))
