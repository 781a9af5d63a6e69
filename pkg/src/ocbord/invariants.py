"""Topological invariants of open-closed cobordism diagrams.

For each connected component of the underlying surface this module
computes the Euler characteristic, the genus, the windows (free boundary
circles, with their colours) and, for the interval boundary ports, the
open boundary permutation sigma together with the colour map gamma that
reads off each port's outgoing free-boundary arc.

The free boundary is traced combinatorially.  Every interval port has a
left and a right corner; each generator contributes fixed arcs between
the corners of its own ports (the coloured edges of its underlying
sheet), and every wire between ports glues corresponding corners.  A
bare source-to-target wire is an identity strip and contributes its two
side arcs instead.  The resulting corner graph is 2-regular, so it
decomposes into cycles: cycles through boundary ports are the mixed
boundary circles (these define sigma), and the purely coloured cycles
are the windows.

Ports are numbered 1..k over the interval segments only, source side
left to right first, then target side.  Walks leave a source port at its
left corner and a target port at its right corner, which orients sigma
so that the multiplication generator alone gives the cycle (1 3 2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    DiagramTerm,
    OcbordError,
    PortGraph,
    Seg,
    canonical_order,
    to_port_graph,
)

# Euler characteristic of each generator's underlying sheet: discs for
# the open generators and the closed cup/cap, pants for the closed
# (co)multiplication, an annulus (whistle) for zip and cozip.
CHI = {
    "mu_A": 1, "eta_A": 1, "Delta_A": 1, "eps_A": 1,
    "mu_C": -1, "eta_C": 1, "Delta_C": -1, "eps_C": 1,
    "zip": 0, "cozip": 0,
}

# Free-boundary arcs of each generator, as (port, corner) pairs over the
# generator's own ports.  Ports are ("in", k) or ("out", k); corners "L"
# and "R".  The multiplication's middle arc is the notch between its two
# inputs; the comultiplication mirrors it.
_ARCS = {
    "mu_A": (((("in", 0), "L"), (("out", 0), "L")),
             ((("in", 0), "R"), (("in", 1), "L")),
             ((("in", 1), "R"), (("out", 0), "R"))),
    "Delta_A": (((("in", 0), "L"), (("out", 0), "L")),
                ((("out", 0), "R"), (("out", 1), "L")),
                ((("in", 0), "R"), (("out", 1), "R"))),
    "eta_A": (((("out", 0), "L"), (("out", 0), "R")),),
    "eps_A": (((("in", 0), "L"), (("in", 0), "R")),),
    "zip": (((("out", 0), "L"), (("out", 0), "R")),),
    "cozip": (((("in", 0), "L"), (("in", 0), "R")),),
    "mu_C": (), "eta_C": (), "Delta_C": (), "eps_C": (),
}


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        self.parent[self.find(x)] = self.find(y)


@dataclass(frozen=True)
class ComponentInvariants:
    """Invariants of one connected component of the surface."""

    src_positions: tuple     # indices into the source boundary object
    tgt_positions: tuple     # indices into the target boundary object
    euler: int
    genus: int
    boundary_circles: int    # black circles + mixed circles + windows
    windows: tuple           # window colours, sorted, one entry per window
    cycles: tuple            # sigma cycles owned by this component

    @property
    def interval_ports(self):
        return tuple(sorted(j for cyc in self.cycles for j in cyc))


@dataclass(frozen=True)
class Invariants:
    """Full invariant record of a diagram."""

    source: tuple
    target: tuple
    components: tuple
    sigma: tuple             # ((j, sigma(j)), ...) over all interval ports
    gamma: tuple             # ((j, colour), ...) over all interval ports

    @property
    def sigma_map(self) -> dict:
        return dict(self.sigma)

    @property
    def gamma_map(self) -> dict:
        return dict(self.gamma)

    @property
    def cycles(self) -> tuple:
        return tuple(cyc for comp in self.components for cyc in comp.cycles)

    @property
    def total_genus(self) -> int:
        return sum(c.genus for c in self.components)

    @property
    def window_count(self) -> int:
        return sum(len(c.windows) for c in self.components)

    def sigma_str(self) -> str:
        """Cycle notation, singletons omitted: ``(2 5 6)(3 4)``."""
        parts = [f"({' '.join(map(str, cyc))})"
                 for cyc in sorted(self.cycles) if len(cyc) > 1]
        return "".join(parts) if parts else "()"

    def to_dict(self) -> dict:
        return {
            "source": [str(s) for s in self.source],
            "target": [str(s) for s in self.target],
            "sigma": {str(j): sj for j, sj in self.sigma},
            "sigma_cycles": self.sigma_str(),
            "gamma": {str(j): c for j, c in self.gamma},
            "genus": self.total_genus,
            "windows": self.window_count,
            "components": [{
                "source_positions": list(c.src_positions),
                "target_positions": list(c.tgt_positions),
                "euler": c.euler,
                "genus": c.genus,
                "boundary_circles": c.boundary_circles,
                "windows": list(c.windows),
                "cycles": [list(cyc) for cyc in c.cycles],
            } for c in self.components],
        }


def _as_graph(x) -> PortGraph:
    if isinstance(x, DiagramTerm):
        return to_port_graph(x)
    return x


def _endpoint_seg(g: PortGraph, ep) -> Seg:
    if ep[0] == "src":
        return g.source[ep[1]]
    if ep[0] == "tgt":
        return g.target[ep[1]]
    if ep[0] == "in":
        return g.nodes[ep[1]].source[ep[2]]
    return g.nodes[ep[1]].target[ep[2]]


def _rotate_cycle(cyc):
    i = cyc.index(min(cyc))
    return tuple(cyc[i:] + cyc[:i])


def invariants(x) -> Invariants:
    """Compute all invariants of a term or port graph."""
    g = _as_graph(x)
    g.validate()

    # Port numbering over interval boundary segments.
    port_no = {}
    nxt = 1
    for i, seg in enumerate(g.source):
        if seg.is_interval:
            port_no[("src", i)] = nxt
            nxt += 1
    for j, seg in enumerate(g.target):
        if seg.is_interval:
            port_no[("tgt", j)] = nxt
            nxt += 1

    # Corner graph: glue corners across wires, collect coloured arcs.
    uf = _UnionFind()
    arcs = []                       # (cornerA, cornerB, colour)
    for prod, cons in g.wires():
        seg = g.producer_seg(prod)
        if not seg.is_interval:
            continue
        if prod[0] == "src" and cons[0] == "tgt":
            arcs.append(((prod, "L"), (cons, "L"), seg.left))
            arcs.append(((prod, "R"), (cons, "R"), seg.right))
        else:
            uf.union((prod, "L"), (cons, "L"))
            uf.union((prod, "R"), (cons, "R"))
    for nid, gen in g.nodes.items():
        for (p1, c1), (p2, c2) in _ARCS[gen.kind]:
            ep1 = (p1[0], nid, p1[1])
            ep2 = (p2[0], nid, p2[1])
            seg = _endpoint_seg(g, ep1)
            colour = seg.left if c1 == "L" else seg.right
            arcs.append(((ep1, c1), (ep2, c2), colour))

    adj = {}                        # corner class -> [(edge id, other class)]
    for eid, (ca, cb, _colour) in enumerate(arcs):
        a, b = uf.find(ca), uf.find(cb)
        adj.setdefault(a, []).append((eid, b))
        adj.setdefault(b, []).append((eid, a))
    black_at = {}                   # corner class -> port number
    for p, j in port_no.items():
        black_at[uf.find((p, "L"))] = j
        black_at[uf.find((p, "R"))] = j

    # sigma: walk the coloured chain from each port's exit corner.
    sigma, gamma = {}, {}
    used = set()
    for p, j in port_no.items():
        exit_corner = (p, "L") if p[0] == "src" else (p, "R")
        cls = uf.find(exit_corner)
        (eid, cur) = adj[cls][0]
        gamma[j] = arcs[eid][2]
        used.add(eid)
        while cur not in black_at:
            eid, cur = next((e, c) for e, c in adj[cur] if e != eid)
            used.add(eid)
        sigma[j] = black_at[cur]

    # Windows: the remaining coloured edges form pure cycles.
    windows = []                    # (an incident node id, colour)
    for eid0 in range(len(arcs)):
        if eid0 in used:
            continue
        (ca, _cb, colour) = arcs[eid0]
        windows.append((ca[0][1], colour))
        eid, cur = eid0, uf.find(arcs[eid0][1])
        used.add(eid0)
        while True:
            step = [(e, c) for e, c in adj[cur] if e not in used]
            if not step:
                break
            eid, cur = step[0]
            used.add(eid)

    # Connected components over nodes and boundary ports.
    cuf = _UnionFind()

    def item(ep):
        if ep[0] in ("src", "tgt"):
            return ("b", ep[0], ep[1])
        return ("n", ep[1])

    for nid in g.nodes:
        cuf.find(("n", nid))
    for i in range(len(g.source)):
        cuf.find(("b", "src", i))
    for j in range(len(g.target)):
        cuf.find(("b", "tgt", j))
    for prod, cons in g.wires():
        cuf.union(item(prod), item(cons))

    comps = {}                      # root -> accumulator
    for x_ in cuf.parent:
        comps.setdefault(cuf.find(x_), {
            "nodes": set(), "src": [], "tgt": [], "chi": 0,
            "circle_ports": 0, "windows": [], "cycles": []})
    for nid, gen in g.nodes.items():
        c = comps[cuf.find(("n", nid))]
        c["nodes"].add(nid)
        c["chi"] += CHI[gen.kind]
    for i, seg in enumerate(g.source):
        c = comps[cuf.find(("b", "src", i))]
        c["src"].append(i)
        if not seg.is_interval:
            c["circle_ports"] += 1
    for j, seg in enumerate(g.target):
        c = comps[cuf.find(("b", "tgt", j))]
        c["tgt"].append(j)
        if not seg.is_interval:
            c["circle_ports"] += 1
    for prod, cons in g.wires():
        seg = g.producer_seg(prod)
        if not seg.is_interval:
            continue
        if prod[0] == "src" and cons[0] == "tgt":
            comps[cuf.find(item(prod))]["chi"] += 1
        elif prod[0] == "out" and cons[0] == "in":
            comps[cuf.find(item(prod))]["chi"] -= 1
    for nid, colour in windows:
        comps[cuf.find(("n", nid))]["windows"].append(colour)

    # sigma cycles, handed to their owning component.
    seen = set()
    for j0 in sorted(sigma):
        if j0 in seen:
            continue
        cyc, j = [], j0
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = sigma[j]
        p = next(p for p, jj in port_no.items() if jj == j0)
        comps[cuf.find(item(p))]["cycles"].append(_rotate_cycle(cyc))

    # Deterministic component order: by smallest owned boundary position,
    # sources before targets; boundary-free components last, ordered by
    # the canonical node order of the graph.
    co_index = {nid: i for i, nid in enumerate(canonical_order(g))}

    def comp_key(c):
        if c["src"]:
            return (0, 0, min(c["src"]))
        if c["tgt"]:
            return (0, 1, min(c["tgt"]))
        return (1, 0, min(co_index[n] for n in c["nodes"]))

    out = []
    for c in sorted(comps.values(), key=comp_key):
        b = c["circle_ports"] + len(c["windows"]) + len(c["cycles"])
        two_g = 2 - c["chi"] - b
        if two_g < 0 or two_g % 2:
            raise OcbordError(
                f"inconsistent topology: euler {c['chi']}, {b} boundary circles")
        out.append(ComponentInvariants(
            src_positions=tuple(sorted(c["src"])),
            tgt_positions=tuple(sorted(c["tgt"])),
            euler=c["chi"],
            genus=two_g // 2,
            boundary_circles=b,
            windows=tuple(sorted(c["windows"])),
            cycles=tuple(sorted(c["cycles"])),
        ))
    return Invariants(
        source=g.source,
        target=g.target,
        components=tuple(out),
        sigma=tuple(sorted(sigma.items())),
        gamma=tuple(sorted(gamma.items())),
    )


def profile_key(inv: Invariants):
    """Hashable summary deciding diffeomorphism equivalence.

    Two diagrams with the same boundary objects are equivalent iff they
    split the boundary into the same components and each component
    agrees in genus, window colours and boundary permutation (with its
    colours); boundary-free components match up to permutation.
    """
    open_parts = []
    closed_parts = []
    gam = inv.gamma_map
    for c in inv.components:
        if c.src_positions or c.tgt_positions:
            open_parts.append((
                c.src_positions, c.tgt_positions, c.genus, c.windows,
                c.cycles, tuple((j, gam[j]) for j in c.interval_ports)))
        else:
            closed_parts.append((c.genus, c.windows))
    return (inv.source, inv.target,
            tuple(sorted(open_parts)), tuple(sorted(closed_parts)))


def equivalent(a, b) -> bool:
    """Decide whether two diagrams are diffeomorphic rel boundary."""
    ga, gb = _as_graph(a), _as_graph(b)
    if ga.source != gb.source or ga.target != gb.target:
        return False
    return profile_key(invariants(ga)) == profile_key(invariants(gb))
