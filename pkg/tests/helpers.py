"""Shared helpers for the test suite: random diagrams, mutations,
profile-changing perturbations."""

import random

from ocbord.diagram import (Cross, DiagramTerm, Gen, Id, Seg, from_port_graph,
                            to_port_graph)
from ocbord.invariants import invariants, profile_key
from ocbord.rewrite import apply_match, find_matches, rules


def _interval(rng, colors):
    return Seg.I(rng.choice(colors), rng.choice(colors))


def _random_source(rng, colors, max_width):
    segs = []
    for _ in range(rng.randint(0, min(3, max_width))):
        segs.append(_interval(rng, colors) if rng.random() < 0.6
                    else Seg.O())
    return segs


def _options(segs, colors, max_width, rng):
    ops = []
    w = len(segs)
    for i, s in enumerate(segs):
        if s.is_interval:
            if w < max_width:
                ops.append(("Delta_A", i))
            if s.left == s.right:
                ops.append(("eps_A", i))
                ops.append(("cozip", i))
            if i + 1 < w and segs[i + 1].is_interval \
                    and s.right == segs[i + 1].left:
                ops.append(("mu_A", i))
                ops.append(("mu_A", i))     # weight joins up
        else:
            if w < max_width:
                ops.append(("Delta_C", i))
            ops.append(("eps_C", i))
            ops.append(("zip", i))
            if i + 1 < w and not segs[i + 1].is_interval:
                ops.append(("mu_C", i))
                ops.append(("mu_C", i))
        if i + 1 < w:
            ops.append(("cross", i))
    if w < max_width:
        for i in range(w + 1):
            ops.append(("eta_A", i))
            ops.append(("eta_C", i))
    return ops


def _make_gen(op, segs, rng, colors):
    kind, i = op
    if kind == "mu_A":
        a, b = segs[i].left, segs[i].right
        return Gen("mu_A", (a, b, segs[i + 1].right))
    if kind == "Delta_A":
        return Gen("Delta_A", (segs[i].left, rng.choice(colors),
                               segs[i].right))
    if kind in ("eps_A", "cozip"):
        return Gen(kind, (segs[i].left,))
    if kind in ("eta_A", "zip"):
        return Gen(kind, (rng.choice(colors),))
    if kind == "cross":
        return Cross(segs[i], segs[i + 1])
    return Gen(kind)


def _attempt(rng, max_gens, colors, max_width):
    segs = _random_source(rng, colors, max_width)
    source = tuple(segs)
    slices = []
    budget = rng.randint(1, max_gens)
    crossings = 0
    while budget > 0:
        ops = _options(segs, colors, max_width, rng)
        if not ops:
            break
        op = rng.choice(ops)
        if op[0] == "cross":
            if crossings >= 5:
                continue
            crossings += 1
        else:
            budget -= 1
        f = _make_gen(op, segs, rng, colors)
        i = op[1]
        eaten = len(f.source)
        row = tuple(Id(s) for s in segs[:i]) + (f,) \
            + tuple(Id(s) for s in segs[i + eaten:])
        segs[i:i + eaten] = list(f.target)
        slices.append(row)
        if rng.random() < 0.04:
            break
    return DiagramTerm(source, tuple(slices))


def component_count(t: DiagramTerm) -> int:
    return len(invariants(to_port_graph(t)).components)


def random_term(rng: random.Random, max_gens: int = 25, colors=("*",),
                max_width: int = 6, connected: bool = True,
                tries: int = 400) -> DiagramTerm:
    """A random well-typed diagram, connected unless asked otherwise."""
    for _ in range(tries):
        t = _attempt(rng, max_gens, colors, max_width)
        t.validate()
        if not connected:
            return t
        if sum(1 for row in t.slices
               for f in row if isinstance(f, Gen)) == 0:
            continue
        if component_count(t) == 1:
            return t
    raise RuntimeError("could not build a connected random diagram")


def random_mutant(rng: random.Random, t: DiagramTerm,
                  steps: int) -> DiagramTerm:
    """Apply ``steps`` random legal rule rewrites to ``t``."""
    g = to_port_graph(t)
    rule_ids = list(rules())
    done = 0
    stalls = 0
    while done < steps and stalls < 3:
        rng.shuffle(rule_ids)
        hit = False
        for rid in rule_ids:
            rev = rng.random() < 0.5
            for r in (rev, not rev):
                ms = find_matches(g, rid, r)
                if ms:
                    g = apply_match(g, rng.choice(ms))
                    done += 1
                    hit = True
                    break
            if hit:
                break
        if not hit:
            stalls += 1
    return from_port_graph(g)


def _palette(g) -> tuple:
    cols = set()
    for gen in g.nodes.values():
        cols.update(gen.colors)
    for seg in g.source + g.target:
        if seg.is_interval:
            cols.update((seg.left, seg.right))
    return tuple(sorted(cols)) or ("*",)


def perturb(rng: random.Random, t: DiagramTerm) -> DiagramTerm:
    """A diagram with the same boundary but a different profile: extra
    genus, an extra window, or rerouted open boundary."""
    g = to_port_graph(t)
    base = profile_key(invariants(g))
    wires = list(g.wires())
    colors = _palette(g)
    for _ in range(60):
        h = g.copy()
        prod, cons = rng.choice(wires)
        seg = h.producer_seg(prod)
        if seg.is_interval:
            if seg.left == seg.right and rng.random() < 0.5:
                # round trip through the closed sector
                cz = h.add_node(Gen("cozip", (seg.left,)))
                z = h.add_node(Gen("zip", (seg.left,)))
                h.unwire_prod(prod)
                h.wire(prod, ("in", cz, 0))
                h.wire(("out", cz, 0), ("in", z, 0))
                h.wire(("out", z, 0), cons)
            else:
                # an open handle
                b = rng.choice(colors)
                d = h.add_node(Gen("Delta_A", (seg.left, b, seg.right)))
                m = h.add_node(Gen("mu_A", (seg.left, b, seg.right)))
                h.unwire_prod(prod)
                h.wire(prod, ("in", d, 0))
                h.wire(("out", d, 0), ("in", m, 0))
                h.wire(("out", d, 1), ("in", m, 1))
                h.wire(("out", m, 0), cons)
        else:
            if rng.random() < 0.5:
                d = h.add_node(Gen("Delta_C"))
                m = h.add_node(Gen("mu_C"))
                h.unwire_prod(prod)
                h.wire(prod, ("in", d, 0))
                h.wire(("out", d, 0), ("in", m, 0))
                h.wire(("out", d, 1), ("in", m, 1))
                h.wire(("out", m, 0), cons)
            else:
                c = rng.choice(colors)
                z = h.add_node(Gen("zip", (c,)))
                cz = h.add_node(Gen("cozip", (c,)))
                h.unwire_prod(prod)
                h.wire(prod, ("in", z, 0))
                h.wire(("out", z, 0), ("in", cz, 0))
                h.wire(("out", cz, 0), cons)
        h.validate()
        if profile_key(invariants(h)) != base:
            return from_port_graph(h)
    raise RuntimeError("could not perturb the diagram's profile")


def perm_term(segs, pi) -> DiagramTerm:
    """Permutation cobordism: the strand entering slot i leaves at pi[i],
    realized as a ladder of adjacent crossings."""
    segs = list(segs)
    dest = list(pi)
    assert sorted(dest) == list(range(len(segs)))
    t = DiagramTerm(tuple(segs), ())
    changed = True
    while changed:
        changed = False
        for i in range(len(dest) - 1):
            if dest[i] > dest[i + 1]:
                row = tuple(Id(s) for s in segs[:i]) \
                    + (Cross(segs[i], segs[i + 1]),) \
                    + tuple(Id(s) for s in segs[i + 2:])
                t = DiagramTerm(t.source, t.slices + (row,))
                segs[i], segs[i + 1] = segs[i + 1], segs[i]
                dest[i], dest[i + 1] = dest[i + 1], dest[i]
                changed = True
    t.validate()
    return t


def mutate_algebra(rng: random.Random, alg):
    """Copy ``alg`` with one structure constant bumped by 1."""
    from fractions import Fraction

    from ocbord.tqft import KFA, LinearMap

    keys = [k for k in sorted(alg.maps, key=str)
            if alg.maps[k].rows and alg.maps[k].cols]
    key = rng.choice(keys)
    m = alg.maps[key]
    r = rng.randrange(m.rows)
    c = rng.randrange(m.cols)
    entries = dict(m.data)
    entries[(r, c)] = entries.get((r, c), Fraction(0)) + 1
    maps = dict(alg.maps)
    maps[key] = LinearMap(m.rows, m.cols, entries)
    return KFA(colors=alg.colors, dims=dict(alg.dims),
               basis=dict(alg.basis), maps=maps,
               name=alg.name + "+mutation"), key, (r, c)


def recolor(t: DiagramTerm, to: str = "*") -> DiagramTerm:
    """The same diagram with every colour renamed to ``to``."""
    def seg(s):
        return Seg.I(to, to) if s.is_interval else s

    def factor(f):
        if isinstance(f, Gen):
            return Gen(f.kind, tuple(to for _ in f.colors))
        if isinstance(f, Id):
            return Id(seg(f.seg))
        return Cross(seg(f.a), seg(f.b))

    return DiagramTerm(tuple(seg(s) for s in t.source),
                       tuple(tuple(factor(f) for f in row)
                             for row in t.slices))
