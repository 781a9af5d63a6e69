"""Normal form of open-closed cobordism diagrams.

Every diagram is equivalent to a canonical one assembled from standard
blocks, and the blocks are read off the invariants alone.  The
construction works on a wrapped copy of the diagram in which all
interval boundary sits on the source and all circle boundary on the
target: each target interval is bent down with an open pairing
(multiply, then counit) and each source circle is bent up with a closed
copairing (unit, then comultiply).  For a wrapped connected component
the normal form is

    splits . handles . windows . merges . (one block per sigma-cycle)

where a block multiplies the cycle's source intervals into one loop and
closes it with a cozipper, the merges fold the block circles into a
single line with closed multiplications (a cap when there are none),
each window is a zipper followed by a cozipper, each handle a closed
comultiplication followed by a multiplication, and the splits fan the
line out to the target circles (a cup when there are none).  Undoing
the wrapping with the dual (co)pairings yields the normal form of the
original diagram.

Conventions fixed here: blocks are ordered by their smallest port, a
block multiplies its cycle as m, s^(q-1)(m), ..., s(m) starting from the
cycle's smallest port m, window factors come in sorted colour order, and
the split chain sends its deepest two outputs to the first two target
circles.  :func:`sigma_bar` instead pairs cycles sorted by (length,
smallest member); the two orderings serve different callers and are
independent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    DiagramTerm,
    Gen,
    OcbordError,
    PortGraph,
    Seg,
    from_port_graph,
    to_port_graph,
)
from .invariants import ComponentInvariants, Invariants, invariants


class CycleTypeMismatch(OcbordError):
    """Raised when two permutations cannot be conjugated as requested."""


def _as_graph(x) -> PortGraph:
    return to_port_graph(x) if isinstance(x, DiagramTerm) else x


@dataclass(frozen=True)
class WrapData:
    """Boundary bookkeeping for :func:`wrap` / :func:`unwrap`.

    Positions are indices into the original boundary objects.  The
    wrapped source is the bent target intervals (orientation reversed)
    followed by the kept source intervals; the wrapped target is the
    kept target circles followed by the bent source circles.
    """

    source: tuple
    target: tuple
    src_intervals: tuple
    src_circles: tuple
    tgt_intervals: tuple
    tgt_circles: tuple

    @property
    def sigma1(self):
        """Source positions reordered intervals-first."""
        return self.src_intervals + self.src_circles

    @property
    def sigma2(self):
        return self.tgt_intervals + self.tgt_circles

    @property
    def wrapped_source(self):
        bent = tuple(Seg.I(self.target[j].right, self.target[j].left)
                     for j in self.tgt_intervals)
        return bent + tuple(self.source[i] for i in self.src_intervals)

    @property
    def wrapped_target(self):
        kept = tuple(self.target[j] for j in self.tgt_circles)
        return kept + tuple(Seg.O() for _ in self.src_circles)


def _wrap_data(source, target) -> WrapData:
    return WrapData(
        source=tuple(source), target=tuple(target),
        src_intervals=tuple(i for i, s in enumerate(source) if s.is_interval),
        src_circles=tuple(i for i, s in enumerate(source)
                          if not s.is_interval),
        tgt_intervals=tuple(j for j, s in enumerate(target) if s.is_interval),
        tgt_circles=tuple(j for j, s in enumerate(target)
                          if not s.is_interval),
    )


def wrap_graph(g: PortGraph):
    """Bend target intervals into source ports and source circles into
    target ports; returns the wrapped graph and the WrapData."""
    w = _wrap_data(g.source, g.target)
    h = PortGraph(w.wrapped_source, w.wrapped_target)
    for nid, gen in g.nodes.items():
        h.add_node(gen, nid)
    src_pos = {i: len(w.tgt_intervals) + k
               for k, i in enumerate(w.src_intervals)}
    tgt_pos = {j: k for k, j in enumerate(w.tgt_circles)}
    pair_in = {}
    for k, j in enumerate(w.tgt_intervals):
        a, b = g.target[j].left, g.target[j].right
        mu = h.add_node(Gen("mu_A", (b, a, b)))
        ep = h.add_node(Gen("eps_A", (b,)))
        h.wire(("src", k), ("in", mu, 0))
        h.wire(("out", mu, 0), ("in", ep, 0))
        pair_in[j] = ("in", mu, 1)
    copair_out = {}
    for k, i in enumerate(w.src_circles):
        et = h.add_node(Gen("eta_C"))
        de = h.add_node(Gen("Delta_C"))
        h.wire(("out", et, 0), ("in", de, 0))
        h.wire(("out", de, 1), ("tgt", len(w.tgt_circles) + k))
        copair_out[i] = ("out", de, 0)

    def prod(ep):
        if ep[0] == "src":
            return copair_out.get(ep[1]) or ("src", src_pos[ep[1]])
        return ep

    def cons(ep):
        if ep[0] == "tgt":
            return pair_in.get(ep[1]) or ("tgt", tgt_pos[ep[1]])
        return ep

    for p, c in g.wires():
        h.wire(prod(p), cons(c))
    h.validate()
    return h, w


def unwrap_graph(h: PortGraph, w: WrapData) -> PortGraph:
    """Undo :func:`wrap_graph` with the dual (co)pairings."""
    if h.source != w.wrapped_source or h.target != w.wrapped_target:
        raise OcbordError("wrap data does not match the diagram boundary")
    g = PortGraph(w.source, w.target)
    for nid, gen in h.nodes.items():
        g.add_node(gen, nid)
    bent_src = {}
    tgt_from = {}
    for k, j in enumerate(w.tgt_intervals):
        a, b = w.target[j].left, w.target[j].right
        et = g.add_node(Gen("eta_A", (b,)))
        de = g.add_node(Gen("Delta_A", (b, a, b)))
        g.wire(("out", et, 0), ("in", de, 0))
        bent_src[k] = ("out", de, 0)
        tgt_from[j] = ("out", de, 1)
    bent_tgt = {}
    for k, i in enumerate(w.src_circles):
        mu = g.add_node(Gen("mu_C"))
        ep = g.add_node(Gen("eps_C"))
        g.wire(("src", i), ("in", mu, 0))
        g.wire(("out", mu, 0), ("in", ep, 0))
        bent_tgt[len(w.tgt_circles) + k] = ("in", mu, 1)

    def prod(ep):
        if ep[0] == "src":
            return bent_src.get(ep[1]) or \
                ("src", w.src_intervals[ep[1] - len(w.tgt_intervals)])
        return ep

    def cons(ep):
        if ep[0] == "tgt":
            return bent_tgt.get(ep[1]) or ("tgt", w.tgt_circles[ep[1]])
        return ep

    for p, c in h.wires():
        g.wire(prod(p), cons(c))
    for j, p in tgt_from.items():
        g.wire(p, ("tgt", j))
    g.validate()
    return g


def wrap(t: DiagramTerm):
    """Term-level wrap; see :func:`wrap_graph`."""
    h, w = wrap_graph(_as_graph(t))
    return from_port_graph(h), w


def unwrap(t: DiagramTerm, w: WrapData) -> DiagramTerm:
    """Term-level unwrap, the inverse of :func:`wrap` up to equivalence."""
    return from_port_graph(unwrap_graph(_as_graph(t), w))


def _leaf_order(cyc):
    # cycles are stored rotated to start at their smallest port m, as
    # (m, s(m), s^2(m), ...); the block multiplies m, s^(q-1)(m), .., s(m)
    return (cyc[0],) + tuple(reversed(cyc[1:]))


def _build_component(h: PortGraph, source, cycles, windows, genus,
                     tgt_positions, where: str) -> None:
    """Emit one component's normal-form blocks into ``h``.

    ``cycles`` hold 1-based port numbers; port j is source position j-1.
    """
    outs = []
    for cyc in sorted(cycles):
        leaves = _leaf_order(cyc)
        cur = ("src", leaves[0] - 1)
        cur_seg = source[leaves[0] - 1]
        for leaf in leaves[1:]:
            seg = source[leaf - 1]
            if cur_seg.right != seg.left:
                raise OcbordError(f"{where}: cycle colours do not chain")
            mu = h.add_node(Gen("mu_A", (cur_seg.left, cur_seg.right,
                                         seg.right)))
            h.wire(cur, ("in", mu, 0))
            h.wire(("src", leaf - 1), ("in", mu, 1))
            cur = ("out", mu, 0)
            cur_seg = Seg.I(cur_seg.left, seg.right)
        if cur_seg.left != cur_seg.right:
            raise OcbordError(f"{where}: cycle colours do not close up")
        cz = h.add_node(Gen("cozip", (cur_seg.left,)))
        h.wire(cur, ("in", cz, 0))
        outs.append(("out", cz, 0))
    if outs:
        main = outs[0]
        for o in outs[1:]:
            mu = h.add_node(Gen("mu_C"))
            h.wire(main, ("in", mu, 0))
            h.wire(o, ("in", mu, 1))
            main = ("out", mu, 0)
    else:
        main = ("out", h.add_node(Gen("eta_C")), 0)
    for colour in windows:
        z = h.add_node(Gen("zip", (colour,)))
        cz = h.add_node(Gen("cozip", (colour,)))
        h.wire(main, ("in", z, 0))
        h.wire(("out", z, 0), ("in", cz, 0))
        main = ("out", cz, 0)
    for _ in range(genus):
        de = h.add_node(Gen("Delta_C"))
        mu = h.add_node(Gen("mu_C"))
        h.wire(main, ("in", de, 0))
        h.wire(("out", de, 0), ("in", mu, 0))
        h.wire(("out", de, 1), ("in", mu, 1))
        main = ("out", mu, 0)
    tgts = sorted(tgt_positions)
    if not tgts:
        h.wire(main, ("in", h.add_node(Gen("eps_C")), 0))
    elif len(tgts) == 1:
        h.wire(main, ("tgt", tgts[0]))
    else:
        side = []
        for _ in range(len(tgts) - 1):
            de = h.add_node(Gen("Delta_C"))
            h.wire(main, ("in", de, 0))
            main = ("out", de, 0)
            side.append(("out", de, 1))
        h.wire(main, ("tgt", tgts[0]))
        for k, p in enumerate(reversed(side)):
            h.wire(p, ("tgt", tgts[k + 1]))


def nf_wrapped_graph(inv: Invariants) -> PortGraph:
    """Normal-form graph for a wrapped diagram, from its invariants."""
    h = PortGraph(inv.source, inv.target)
    for c in inv.components:
        _build_component(h, inv.source, c.cycles, c.windows, c.genus,
                         c.tgt_positions, "normal form")
    h.validate()
    return h


def normal_form(x) -> DiagramTerm:
    """The canonical representative of a diagram's equivalence class.

    Idempotent, boundary-preserving, and equivalent to the input.
    """
    g = _as_graph(x)
    g.validate()
    h, w = wrap_graph(g)
    nf = nf_wrapped_graph(invariants(h))
    return from_port_graph(unwrap_graph(nf, w))


def nf_open_to_closed(p: ComponentInvariants, n, m) -> DiagramTerm:
    """Normal form of one connected all-interval-to-all-circle profile."""
    n, m = tuple(n), tuple(m)
    if any(not s.is_interval for s in n) or any(s.is_interval for s in m):
        raise OcbordError(
            "nf_open_to_closed wants an interval source and a circle target")
    if p.src_positions != tuple(range(len(n))) or \
            p.tgt_positions != tuple(range(len(m))):
        raise OcbordError("profile does not cover the whole boundary")
    ports = sorted(j for cyc in p.cycles for j in cyc)
    if ports != list(range(1, len(n) + 1)):
        raise OcbordError("cycles do not partition the source ports")
    if p.genus < 0:
        raise OcbordError("negative genus")
    h = PortGraph(n, m)
    _build_component(h, n, p.cycles, p.windows, p.genus, p.tgt_positions,
                     "profile")
    h.validate()
    return from_port_graph(h)


@dataclass(frozen=True)
class NormalFormBlocks:
    """Block data of one component's normal form."""

    cycle_lengths: tuple
    block_count: int
    windows: tuple
    genus: int
    out_circles: int
    leaf_order: tuple        # port numbers in block-leaf reading order

    @property
    def sigma_bar_word(self):
        """The source shuffle: position k of the blocks reads port
        leaf_order[k]."""
        return self.leaf_order


def normal_form_blocks(c: ComponentInvariants) -> NormalFormBlocks:
    blocks = sorted(c.cycles)
    return NormalFormBlocks(
        cycle_lengths=tuple(len(cyc) for cyc in blocks),
        block_count=len(blocks),
        windows=c.windows,
        genus=c.genus,
        out_circles=len(c.tgt_positions),
        leaf_order=tuple(j for cyc in blocks for j in _leaf_order(cyc)),
    )


def _cycles_of(perm: dict):
    cycles = []
    seen = set()
    for start in sorted(perm):
        if start in seen:
            continue
        cyc, j = [], start
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        cycles.append(tuple(cyc))
    return cycles


def sigma_bar(sigma, tau, sigma_colors=None, tau_colors=None) -> dict:
    """Deterministic conjugator: a bijection pi with pi.sigma = tau.pi.

    Cycles of both permutations are sorted by (length, smallest member)
    and paired in order; paired cycles are aligned starting from their
    smallest members.  With colour maps given, aligned points must have
    equal colours.  Raises CycleTypeMismatch otherwise.
    """
    s, t = dict(sigma), dict(tau)
    for name, p in (("sigma", s), ("tau", t)):
        if sorted(p) != sorted(p.values()):
            raise CycleTypeMismatch(f"{name} is not a permutation")
    key = lambda cyc: (len(cyc), cyc[0])
    sc = sorted(_cycles_of(s), key=key)
    tc = sorted(_cycles_of(t), key=key)
    if [len(c) for c in sc] != [len(c) for c in tc]:
        raise CycleTypeMismatch("cycle types differ")
    pi = {}
    for cs, ct in zip(sc, tc):
        for x, y in zip(cs, ct):
            pi[x] = y
    if sigma_colors is not None and tau_colors is not None:
        gs, gt = dict(sigma_colors), dict(tau_colors)
        for x, y in pi.items():
            if gs.get(x) != gt.get(y):
                raise CycleTypeMismatch(
                    f"colour mismatch: port {x} is {gs.get(x)} but its "
                    f"image {y} is {gt.get(y)}")
    return pi
