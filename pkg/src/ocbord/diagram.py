"""Core representation of open-closed cobordism diagrams.

A diagram lives in two interchangeable forms:

* a *term*: a vertical stack of slices, each slice a left-to-right row of
  factors (generators, identities, wire crossings), read top to bottom;
* a *port graph*: generator nodes wired together, with ordered boundary
  ports.

Identities and crossings are term bookkeeping only.  Converting a term to
a port graph absorbs them into the wiring; converting back synthesises
fresh ones.  Two terms denote the same ordered wiring exactly when their
port graphs are equal under :func:`canonical_key`.

Boundary objects are tuples of segments: circles ``O`` and intervals
``I[a,b]`` whose two edge colours ``a`` (left) and ``b`` (right) name the
free-boundary labels.  Monochrome diagrams use the single colour ``*``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

DEFAULT_COLOR = "*"


class OcbordError(Exception):
    """Base class for errors raised by this package."""


class TypingError(OcbordError):
    """A diagram fails to type-check (mismatched boundary segments)."""


@dataclass(frozen=True)
class Seg:
    """One boundary segment: a circle ``O`` or an interval ``I[left,right]``."""

    kind: str
    left: str = ""
    right: str = ""

    @staticmethod
    def O() -> "Seg":
        return Seg("O")

    @staticmethod
    def I(left: str = DEFAULT_COLOR, right: str = DEFAULT_COLOR) -> "Seg":
        return Seg("I", left, right)

    @property
    def is_interval(self) -> bool:
        return self.kind == "I"

    def __str__(self) -> str:
        if self.kind == "O":
            return "O"
        if self.left == DEFAULT_COLOR and self.right == DEFAULT_COLOR:
            return "I"
        return f"I[{self.left},{self.right}]"


def fmt_obj(segs) -> str:
    """Render a boundary object for error messages and printing."""
    return ", ".join(str(s) for s in segs) if segs else "(empty)"


# Generator signatures.  Colour parameters follow the strip reading:
# mu_A[a,b,c] multiplies I[a,b] (x) I[b,c] -> I[a,c]; Delta_A[a,b,c] is its
# mirror; zip/cozip mediate between a circle and a one-colour interval.
_SIGS = {
    "mu_A":    (3, lambda a, b, c: ((Seg.I(a, b), Seg.I(b, c)), (Seg.I(a, c),))),
    "eta_A":   (1, lambda a: ((), (Seg.I(a, a),))),
    "Delta_A": (3, lambda a, b, c: ((Seg.I(a, c),), (Seg.I(a, b), Seg.I(b, c)))),
    "eps_A":   (1, lambda a: ((Seg.I(a, a),), ())),
    "mu_C":    (0, lambda: ((Seg.O(), Seg.O()), (Seg.O(),))),
    "eta_C":   (0, lambda: ((), (Seg.O(),))),
    "Delta_C": (0, lambda: ((Seg.O(),), (Seg.O(), Seg.O()))),
    "eps_C":   (0, lambda: ((Seg.O(),), ())),
    "zip":     (1, lambda a: ((Seg.O(),), (Seg.I(a, a),))),
    "cozip":   (1, lambda a: ((Seg.I(a, a),), (Seg.O(),))),
}

GEN_KINDS = tuple(_SIGS)


@lru_cache(maxsize=None)
def _sig(kind: str, colors: tuple) -> tuple:
    return _SIGS[kind][1](*colors)


@dataclass(frozen=True)
class Gen:
    """A single generator occurrence, e.g. ``Gen("mu_A", ("a","b","c"))``."""

    kind: str
    colors: tuple = ()

    def __post_init__(self):
        if self.kind not in _SIGS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        want = _SIGS[self.kind][0]
        if len(self.colors) != want:
            raise ValueError(
                f"{self.kind} takes {want} colour(s), got {len(self.colors)}")

    @property
    def source(self) -> tuple:
        return _sig(self.kind, self.colors)[0]

    @property
    def target(self) -> tuple:
        return _sig(self.kind, self.colors)[1]

    def __str__(self) -> str:
        if not self.colors or all(c == DEFAULT_COLOR for c in self.colors):
            return self.kind
        return f"{self.kind}[{','.join(self.colors)}]"


@dataclass(frozen=True)
class Id:
    """Identity factor on one segment."""

    seg: Seg

    @property
    def source(self) -> tuple:
        return (self.seg,)

    @property
    def target(self) -> tuple:
        return (self.seg,)

    def __str__(self) -> str:
        return f"id:{self.seg}"


@dataclass(frozen=True)
class Cross:
    """Crossing factor: swaps two adjacent segments."""

    a: Seg
    b: Seg

    @property
    def source(self) -> tuple:
        return (self.a, self.b)

    @property
    def target(self) -> tuple:
        return (self.b, self.a)

    def __str__(self) -> str:
        return f"cross({self.a},{self.b})"


# Convenience constructors, handy in tests and when building rules.

def mu_A(a=DEFAULT_COLOR, b=DEFAULT_COLOR, c=DEFAULT_COLOR) -> Gen:
    return Gen("mu_A", (a, b, c))


def eta_A(a=DEFAULT_COLOR) -> Gen:
    return Gen("eta_A", (a,))


def Delta_A(a=DEFAULT_COLOR, b=DEFAULT_COLOR, c=DEFAULT_COLOR) -> Gen:
    return Gen("Delta_A", (a, b, c))


def eps_A(a=DEFAULT_COLOR) -> Gen:
    return Gen("eps_A", (a,))


def mu_C() -> Gen:
    return Gen("mu_C")


def eta_C() -> Gen:
    return Gen("eta_C")


def Delta_C() -> Gen:
    return Gen("Delta_C")


def eps_C() -> Gen:
    return Gen("eps_C")


def zip_(a=DEFAULT_COLOR) -> Gen:
    return Gen("zip", (a,))


def cozip(a=DEFAULT_COLOR) -> Gen:
    return Gen("cozip", (a,))


@dataclass(frozen=True)
class DiagramTerm:
    """A diagram presented as slices of factors.

    ``source`` is the top boundary object; the bottom one is computed by
    :meth:`validate`, which also type-checks every slice boundary.
    """

    source: tuple
    slices: tuple

    def validate(self) -> tuple:
        """Type-check and return the target boundary object."""
        cur = self.source
        for si, sl in enumerate(self.slices):
            need = tuple(s for f in sl for s in f.source)
            if need != cur:
                raise TypingError(
                    f"slice {si + 1} expects ({fmt_obj(need)}) "
                    f"on top but the diagram provides ({fmt_obj(cur)})")
            cur = tuple(s for f in sl for s in f.target)
        return cur

    @property
    def target(self) -> tuple:
        return self.validate()

    def then(self, other: "DiagramTerm") -> "DiagramTerm":
        return compose(self, other)

    def beside(self, other: "DiagramTerm") -> "DiagramTerm":
        return tensor(self, other)


def gen_term(g: Gen) -> DiagramTerm:
    """The one-slice term consisting of a single generator."""
    return DiagramTerm(g.source, ((g,),))


def identity_term(obj) -> DiagramTerm:
    obj = tuple(obj)
    if not obj:
        return DiagramTerm((), ())
    return DiagramTerm(obj, (tuple(Id(s) for s in obj),))


def compose(first: DiagramTerm, then: DiagramTerm) -> DiagramTerm:
    """Vertical composition: ``first`` on top, ``then`` below."""
    mid = first.validate()
    if mid != then.source:
        raise TypingError(
            f"cannot compose: top part ends in ({fmt_obj(mid)}) "
            f"but bottom part starts at ({fmt_obj(then.source)})")
    return DiagramTerm(first.source, first.slices + then.slices)


def _id_slice(obj) -> tuple:
    return tuple(Id(s) for s in obj)


def tensor(f: DiagramTerm, g: DiagramTerm) -> DiagramTerm:
    """Horizontal juxtaposition, padding the shorter side with identities."""
    ft, gt = f.validate(), g.validate()
    n = max(len(f.slices), len(g.slices))
    fs = list(f.slices) + [_id_slice(ft)] * (n - len(f.slices))
    gs = list(g.slices) + [_id_slice(gt)] * (n - len(g.slices))
    return DiagramTerm(f.source + g.source,
                       tuple(fa + ga for fa, ga in zip(fs, gs)))


def syntactic_eq(t1: DiagramTerm, t2: DiagramTerm) -> bool:
    """Literal equality of terms (same slices, factor by factor)."""
    return t1.source == t2.source and t1.slices == t2.slices


class PortGraph:
    """Generator nodes wired together, with ordered boundary ports.

    Wire endpoints are tagged tuples: producers are ``("src", i)`` or
    ``("out", nid, k)``, consumers are ``("tgt", j)`` or ``("in", nid, k)``.
    ``out_to_in`` maps each producer to its consumer; ``in_to_out`` is the
    inverse.  Node ids are arbitrary but stable: copies and rewrites keep
    them, so they can anchor a replayable move log.
    """

    def __init__(self, source=(), target=()):
        self.source = tuple(source)
        self.target = tuple(target)
        self.nodes: dict = {}
        self.out_to_in: dict = {}
        self.in_to_out: dict = {}
        self._next = 0

    def copy(self) -> "PortGraph":
        g = PortGraph(self.source, self.target)
        g.nodes = dict(self.nodes)
        g.out_to_in = dict(self.out_to_in)
        g.in_to_out = dict(self.in_to_out)
        g._next = self._next
        return g

    def add_node(self, gen: Gen, nid=None) -> int:
        if nid is None:
            nid = self._next
        if nid in self.nodes:
            raise ValueError(f"node id {nid} already used")
        self._next = max(self._next, nid + 1)
        self.nodes[nid] = gen
        return nid

    def remove_node(self, nid: int) -> None:
        gen = self.nodes.pop(nid)
        for k in range(len(gen.source)):
            prod = self.in_to_out.pop(("in", nid, k), None)
            if prod is not None:
                self.out_to_in.pop(prod, None)
        for k in range(len(gen.target)):
            cons = self.out_to_in.pop(("out", nid, k), None)
            if cons is not None:
                self.in_to_out.pop(cons, None)

    def wire(self, prod, cons) -> None:
        self.out_to_in[prod] = cons
        self.in_to_out[cons] = prod

    def unwire_prod(self, prod):
        cons = self.out_to_in.pop(prod)
        del self.in_to_out[cons]
        return cons

    def unwire_cons(self, cons):
        prod = self.in_to_out.pop(cons)
        del self.out_to_in[prod]
        return prod

    def wires(self):
        return self.out_to_in.items()

    def producer_seg(self, prod) -> Seg:
        if prod[0] == "src":
            return self.source[prod[1]]
        return self.nodes[prod[1]].target[prod[2]]

    def consumer_seg(self, cons) -> Seg:
        if cons[0] == "tgt":
            return self.target[cons[1]]
        return self.nodes[cons[1]].source[cons[2]]

    def producers(self):
        for i in range(len(self.source)):
            yield ("src", i)
        for nid, gen in self.nodes.items():
            for k in range(len(gen.target)):
                yield ("out", nid, k)

    def consumers(self):
        for j in range(len(self.target)):
            yield ("tgt", j)
        for nid, gen in self.nodes.items():
            for k in range(len(gen.source)):
                yield ("in", nid, k)

    def validate(self) -> None:
        prods = set(self.producers())
        conss = set(self.consumers())
        if set(self.out_to_in) != prods:
            missing = prods - set(self.out_to_in)
            extra = set(self.out_to_in) - prods
            raise TypingError(f"unwired or stray producers: {missing or extra}")
        if set(self.in_to_out) != conss:
            missing = conss - set(self.in_to_out)
            extra = set(self.in_to_out) - conss
            raise TypingError(f"unwired or stray consumers: {missing or extra}")
        for prod, cons in self.out_to_in.items():
            if self.in_to_out.get(cons) != prod:
                raise TypingError(f"wire maps disagree at {prod} -> {cons}")
            ps, cs = self.producer_seg(prod), self.consumer_seg(cons)
            if ps != cs:
                raise TypingError(
                    f"wire {prod} -> {cons} carries {ps} into a {cs} port")


def to_port_graph(term: DiagramTerm) -> PortGraph:
    """Interpret a term as a port graph, absorbing identities and crossings."""
    tgt = term.validate()
    g = PortGraph(term.source, tgt)
    frontier = [("src", i) for i in range(len(term.source))]
    for sl in term.slices:
        pos = 0
        nxt = []
        for f in sl:
            m = len(f.source)
            ins = frontier[pos:pos + m]
            pos += m
            if isinstance(f, Id):
                nxt.extend(ins)
            elif isinstance(f, Cross):
                nxt.extend((ins[1], ins[0]))
            else:
                nid = g.add_node(f)
                for k, p in enumerate(ins):
                    g.wire(p, ("in", nid, k))
                nxt.extend(("out", nid, k) for k in range(len(f.target)))
        frontier = nxt
    for j, p in enumerate(frontier):
        g.wire(p, ("tgt", j))
    return g


def _walk_order(g: PortGraph, seeds) -> list:
    """Breadth-first node order, exploring each node's ports left to right."""
    order, seen = [], set()
    q = deque()

    def see(ep):
        if ep[0] in ("in", "out") and ep[1] not in seen:
            seen.add(ep[1])
            order.append(ep[1])
            q.append(ep[1])

    for ep in seeds:
        see(ep)
    while q:
        nid = q.popleft()
        gen = g.nodes[nid]
        for k in range(len(gen.source)):
            see(g.in_to_out[("in", nid, k)])
        for k in range(len(gen.target)):
            see(g.out_to_in[("out", nid, k)])
    return order


def _component_nodes(g: PortGraph, start: int) -> set:
    return set(_walk_order(g, [("out", start, 0) if g.nodes[start].target
                               else ("in", start, 0)])) | {start}


def _serial_from(g: PortGraph, order: list) -> str:
    idx = {nid: i for i, nid in enumerate(order)}

    def ck(ep):
        if ep[0] == "in" or ep[0] == "out":
            return (ep[0], idx[ep[1]], ep[2])
        return ep

    parts = []
    for nid in order:
        gen = g.nodes[nid]
        outs = tuple(ck(g.out_to_in[("out", nid, k)])
                     for k in range(len(gen.target)))
        parts.append((gen.kind, gen.colors, outs))
    return repr(parts)


def canonical_order(g: PortGraph) -> list:
    """Deterministic node order, independent of node ids.

    Nodes reachable from the boundary come first, in breadth-first order
    seeded by the source ports then the target ports.  Each remaining
    (closed, boundary-free) component is ordered by the seed that
    minimises its serialisation, and components are sorted the same way.
    """
    seeds = [g.out_to_in[("src", i)] for i in range(len(g.source))]
    seeds += [g.in_to_out[("tgt", j)] for j in range(len(g.target))]
    order = _walk_order(g, seeds)
    left = set(g.nodes) - set(order)
    comps = []
    while left:
        start = next(iter(left))
        comp = {n for n in _component_nodes(g, start) if n in left}
        left -= comp
        best = None
        for seed in sorted(comp):
            gen = g.nodes[seed]
            ep = ("out", seed, 0) if gen.target else ("in", seed, 0)
            cand = _walk_order(g, [ep])
            if seed not in cand:
                cand = [seed] + cand
            ser = _serial_from(g, cand)
            if best is None or ser < best[0]:
                best = (ser, cand)
        comps.append(best)
    comps.sort(key=lambda b: b[0])
    for _, cand in comps:
        order.extend(cand)
    return order


def canonical_key(g: PortGraph) -> str:
    """A string equal for two port graphs iff they are identical up to ids."""
    order = canonical_order(g)
    idx = {nid: i for i, nid in enumerate(order)}

    def ck(ep):
        if ep[0] == "in" or ep[0] == "out":
            return (ep[0], idx[ep[1]], ep[2])
        return ep

    parts = [tuple(map(str, g.source)), tuple(map(str, g.target)),
             tuple(ck(g.out_to_in[("src", i)]) for i in range(len(g.source)))]
    for nid in order:
        gen = g.nodes[nid]
        outs = tuple(ck(g.out_to_in[("out", nid, k)])
                     for k in range(len(gen.target)))
        parts.append((gen.kind, gen.colors, outs))
    return repr(parts)


def graph_eq(g1: PortGraph, g2: PortGraph) -> bool:
    return canonical_key(g1) == canonical_key(g2)


def canonical_relabel(g: PortGraph) -> PortGraph:
    """Copy of ``g`` with nodes renumbered 0.. in canonical order."""
    order = canonical_order(g)
    idx = {nid: i for i, nid in enumerate(order)}

    def ck(ep):
        if ep[0] == "in" or ep[0] == "out":
            return (ep[0], idx[ep[1]], ep[2])
        return ep

    h = PortGraph(g.source, g.target)
    for nid in order:
        h.add_node(g.nodes[nid], idx[nid])
    for prod, cons in g.out_to_in.items():
        h.wire(ck(prod), ck(cons))
    return h


def from_port_graph(g: PortGraph) -> DiagramTerm:
    """Lay a port graph out as a term.

    The layout is canonical: graphs equal under :func:`canonical_key`
    produce identical terms.  Nodes are placed one per slice, leftmost
    ready node first; crossings are synthesised to gather each node's
    inputs; input-less nodes join at the right edge when nothing else is
    ready.
    """
    g = canonical_relabel(g)
    frontier = [("src", i) for i in range(len(g.source))]
    segs = [g.producer_seg(p) for p in frontier]
    slices = []

    def emit_swap(i):
        row = tuple(Id(segs[p]) for p in range(i)) \
            + (Cross(segs[i], segs[i + 1]),) \
            + tuple(Id(segs[p]) for p in range(i + 2, len(segs)))
        slices.append(row)
        frontier[i], frontier[i + 1] = frontier[i + 1], frontier[i]
        segs[i], segs[i + 1] = segs[i + 1], segs[i]

    def place(nid):
        gen = g.nodes[nid]
        ins = [g.in_to_out[("in", nid, k)] for k in range(len(gen.source))]
        if ins:
            q = min(frontier.index(p) for p in ins)
            for k, p in enumerate(ins):
                cur = frontier.index(p)
                while cur > q + k:
                    emit_swap(cur - 1)
                    cur -= 1
            row = tuple(Id(segs[p]) for p in range(q)) + (gen,) \
                + tuple(Id(segs[p]) for p in range(q + len(ins), len(segs)))
            frontier[q:q + len(ins)] = [("out", nid, k)
                                        for k in range(len(gen.target))]
            segs[q:q + len(ins)] = list(gen.target)
        else:
            row = tuple(Id(s) for s in segs) + (gen,)
            frontier.extend(("out", nid, k) for k in range(len(gen.target)))
            segs.extend(gen.target)
        slices.append(row)

    remaining = set(g.nodes)
    while remaining:
        avail = set(frontier)
        best = None
        for nid in sorted(remaining):
            gen = g.nodes[nid]
            if not gen.source:
                continue
            eps = [g.in_to_out[("in", nid, k)] for k in range(len(gen.source))]
            if all(p in avail for p in eps):
                pos = min(frontier.index(p) for p in eps)
                if best is None or pos < best[0]:
                    best = (pos, nid)
        if best is not None:
            nid = best[1]
        else:
            srcless = sorted(n for n in remaining if not g.nodes[n].source)
            if not srcless:
                raise OcbordError("port graph is cyclic; cannot lay out")
            nid = srcless[0]
        place(nid)
        remaining.discard(nid)

    for j in range(len(g.target)):
        p = g.in_to_out[("tgt", j)]
        cur = frontier.index(p)
        while cur > j:
            emit_swap(cur - 1)
            cur -= 1
    return DiagramTerm(g.source, tuple(slices))
