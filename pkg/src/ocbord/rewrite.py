"""Relation catalog, local rewriting, and trace-checked normalization.

The catalog in ``data/rules.json`` lists oriented equations between small
diagrams.  Each rule carries an id, a group tag, a one-line statement of
the law, and the two sides as diagram text.  Colour names appearing in a
rule are variables: matching binds them to the colours found in the host
diagram, and the replacement side is instantiated under the same binding.

A match of a pattern ``P`` in a host graph is an injective map of the
pattern's nodes onto host nodes of the same kind whose internal wires all
exist in the host, together with the host endpoints that feed the
pattern's source ports and consume its target ports.  Those frontier
endpoints must lie outside the matched nodes, so the matched region can
be cut out and the other side glued into the hole.  Sites are reported
in a fixed order, and replacement nodes get fresh ids in a fixed order,
so a rewrite is reproducible from the site alone.

``normalize_with_trace`` rewrites a diagram to its normal form using only
catalog rules and records every step.  The moves act on the wrapped form
of the diagram (all-interval source, all-circle target); the log can be
replayed and verified independently with :func:`check_trace`.

Trace files are plain text::

    ocbord-trace 1
    initial-begin
    <diagram text>
    initial-end
    1 <rule-id> fwd|rev <nodes> <sources> <targets>
    ...
    final-begin
    <diagram text>
    final-end

where ``<nodes>`` are the matched host node ids in pattern order and the
frontier endpoints are written ``s0``/``t1`` for boundary ports and
``o3.0``/``i7.1`` for node outputs and inputs, comma separated, with
``-`` for an empty list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .diagram import (DiagramTerm, Gen, OcbordError, PortGraph,
                      from_port_graph, graph_eq, syntactic_eq, to_port_graph)
from .dsl import parse, render
from .invariants import invariants
from .normalform import nf_wrapped_graph, normal_form, unwrap, wrap


class StrategyStuck(OcbordError):
    """Normalization could not reach the expected normal form."""


class TraceError(OcbordError):
    """A move log failed verification."""


@dataclass(frozen=True)
class Rule:
    id: str
    group: str
    law: str
    lhs: DiagramTerm
    rhs: DiagramTerm

    def side(self, reverse: bool = False) -> DiagramTerm:
        return self.rhs if reverse else self.lhs


@lru_cache(maxsize=None)
def rules() -> dict:
    """The shipped relation catalog keyed by rule id.  Treat as read-only."""
    text = resources.files(__package__).joinpath("data", "rules.json") \
        .read_text("utf-8")
    out = {}
    for r in json.loads(text)["rules"]:
        out[r["id"]] = Rule(r["id"], r["group"], r["law"],
                            parse(r["lhs"]), parse(r["rhs"]))
    return out


@lru_cache(maxsize=None)
def _pattern(rule_id: str, reverse: bool) -> PortGraph:
    # cached and shared; matching never mutates pattern graphs
    return to_port_graph(rules()[rule_id].side(reverse))


@lru_cache(maxsize=None)
def _replacement_links(rule_id: str, reverse: bool) -> tuple:
    """For each source port of the glued-in side, the set of target
    ports it can reach through it."""
    R = _pattern(rule_id, not reverse)
    conn = []
    for i in range(len(R.source)):
        hit, seen = set(), set()
        stack = [R.out_to_in[("src", i)]]
        while stack:
            c = stack.pop()
            if c[0] == "tgt":
                hit.add(c[1])
            elif c[0] == "in" and c[1] not in seen:
                seen.add(c[1])
                for k in range(len(R.nodes[c[1]].target)):
                    stack.append(R.out_to_in[("out", c[1], k)])
        conn.append(frozenset(hit))
    return tuple(conn)


@dataclass(frozen=True)
class Match:
    """One site where a rule side matches, with its colour binding."""
    rule: str
    reverse: bool
    nodes: tuple        # host node ids, in pattern node order
    src_prod: tuple     # host producer feeding each pattern source port
    tgt_cons: tuple     # host consumer eating each pattern target port
    env: tuple          # sorted (variable, colour) pairs


def _unify_seg(env, pseg, hseg) -> bool:
    if pseg.is_interval != hseg.is_interval:
        return False
    if pseg.is_interval:
        if env.setdefault(pseg.left, hseg.left) != hseg.left:
            return False
        if env.setdefault(pseg.right, hseg.right) != hseg.right:
            return False
    return True


def _bind(host: PortGraph, P: PortGraph, nodes: tuple):
    """Check a node assignment; return (env, src_prod, tgt_cons, bare).

    ``bare`` lists pattern source->target wires still needing a host wire.
    Returns None when the assignment is not a match.
    """
    pnodes = sorted(P.nodes)
    if len(nodes) != len(pnodes) or len(set(nodes)) != len(nodes):
        return None
    mp = dict(zip(pnodes, nodes))
    env: dict = {}
    for pn, hn in mp.items():
        if hn not in host.nodes:
            return None
        pg, hg = P.nodes[pn], host.nodes[hn]
        if pg.kind != hg.kind:
            return None
        for v, c in zip(pg.colors, hg.colors):
            if env.setdefault(v, c) != c:
                return None
    mapped = set(nodes)
    src_prod: list = [None] * len(P.source)
    tgt_cons: list = [None] * len(P.target)
    bare = []
    for prod, cons in P.wires():
        if prod[0] == "out" and cons[0] == "in":
            hp = ("out", mp[prod[1]], prod[2])
            if host.out_to_in.get(hp) != ("in", mp[cons[1]], cons[2]):
                return None
        elif prod[0] == "src" and cons[0] == "in":
            hp = host.in_to_out[("in", mp[cons[1]], cons[2])]
            if hp[0] == "out" and hp[1] in mapped:
                return None
            if not _unify_seg(env, P.source[prod[1]], host.producer_seg(hp)):
                return None
            src_prod[prod[1]] = hp
        elif prod[0] == "out" and cons[0] == "tgt":
            hc = host.out_to_in[("out", mp[prod[1]], prod[2])]
            if hc[0] == "in" and hc[1] in mapped:
                return None
            if not _unify_seg(env, P.target[cons[1]],
                              host.consumer_seg(hc)):
                return None
            tgt_cons[cons[1]] = hc
        else:
            bare.append((prod[1], cons[1]))
    return env, src_prod, tgt_cons, bare


def _reaches(host: PortGraph, start: int, goals: set) -> bool:
    seen = set()
    stack = [start]
    while stack:
        n = stack.pop()
        if n in goals:
            return True
        if n in seen:
            continue
        seen.add(n)
        for k in range(len(host.nodes[n].target)):
            c = host.out_to_in[("out", n, k)]
            if c[0] == "in":
                stack.append(c[1])
    return False


def _splice_is_acyclic(host, rule_id, reverse, src_prod, tgt_cons) -> bool:
    # gluing may not close a loop: no host path from a consumed target
    # back to a produced source that the new material connects again
    conn = _replacement_links(rule_id, reverse)
    for j, tc in enumerate(tgt_cons):
        if tc[0] != "in":
            continue
        goals = {src_prod[i][1] for i in range(len(src_prod))
                 if j in conn[i] and src_prod[i][0] == "out"}
        if goals and _reaches(host, tc[1], goals):
            return False
    return True


def find_matches(host: PortGraph, rule_id: str, reverse: bool = False,
                 at: tuple = None) -> list:
    """All sites where the rule side matches, in a fixed order.

    ``at`` pins the host node assignment (pattern node order) instead of
    searching.
    """
    P = _pattern(rule_id, reverse)
    pnodes = sorted(P.nodes)
    out = []

    def settle(nodes, env, src_prod, tgt_cons, bare):
        if not bare:
            if None in src_prod or None in tgt_cons:
                return      # unreachable for well-formed patterns
            if not _splice_is_acyclic(host, rule_id, reverse,
                                      src_prod, tgt_cons):
                return
            out.append(Match(rule_id, reverse, nodes, tuple(src_prod),
                             tuple(tgt_cons), tuple(sorted(env.items()))))
            return
        (i, j), rest = bare[0], bare[1:]
        used = set(src_prod) | set(tgt_cons)
        for hp in sorted(host.out_to_in):
            hc = host.out_to_in[hp]
            if hp[0] == "out" and hp[1] in nodes:
                continue
            if hc[0] == "in" and hc[1] in nodes:
                continue
            if hp in used or hc in used:
                continue
            e2 = dict(env)
            if not _unify_seg(e2, P.source[i], host.producer_seg(hp)):
                continue
            sp, tc = list(src_prod), list(tgt_cons)
            sp[i], tc[j] = hp, hc
            settle(nodes, e2, sp, tc, rest)

    def attempt(nodes):
        got = _bind(host, P, nodes)
        if got is not None:
            settle(nodes, *got)

    if at is not None:
        attempt(tuple(at))
    elif not pnodes:
        attempt(())
    else:
        kinds = [P.nodes[n].kind for n in pnodes]
        cands = sorted(n for n in host.nodes)

        def assign(i, chosen):
            if i == len(pnodes):
                attempt(tuple(chosen))
                return
            for hn in cands:
                if hn in chosen or host.nodes[hn].kind != kinds[i]:
                    continue
                assign(i + 1, chosen + (hn,))

        assign(0, ())
    out.sort(key=lambda m: (m.nodes, m.src_prod, m.tgt_cons))
    return out


def _apply_full(host: PortGraph, m: Match):
    rule = rules()[m.rule]
    R = _pattern(m.rule, not m.reverse)
    env = dict(m.env)
    h = host.copy()
    for hn in m.nodes:
        h.remove_node(hn)
    idmap = {}
    for rn in sorted(R.nodes):
        gen = R.nodes[rn]
        try:
            cols = tuple(env[v] for v in gen.colors)
        except KeyError as e:
            raise OcbordError(
                f"rule {rule.id} cannot be applied "
                f"{'backwards' if m.reverse else 'forwards'}: "
                f"colour {e} is not determined by the matched side")
        idmap[rn] = h.add_node(Gen(gen.kind, cols))
    for prod, cons in R.wires():
        hp = m.src_prod[prod[1]] if prod[0] == "src" \
            else ("out", idmap[prod[1]], prod[2])
        hc = m.tgt_cons[cons[1]] if cons[0] == "tgt" \
            else ("in", idmap[cons[1]], cons[2])
        h.wire(hp, hc)
    return h, [idmap[rn] for rn in sorted(R.nodes)]


def apply_match(host: PortGraph, m: Match) -> PortGraph:
    """Cut out the matched side and glue in the other side of the rule."""
    return _apply_full(host, m)[0]


# --- move logs ----------------------------------------------------------

@dataclass(frozen=True)
class Move:
    rule: str
    reverse: bool
    nodes: tuple
    src_prod: tuple
    tgt_cons: tuple


@dataclass(frozen=True)
class MoveTrace:
    initial: DiagramTerm
    moves: tuple
    final: DiagramTerm


def _move_of(m: Match) -> Move:
    return Move(m.rule, m.reverse, m.nodes, m.src_prod, m.tgt_cons)


def _ep_str(ep) -> str:
    tag = ep[0]
    if tag == "src":
        return f"s{ep[1]}"
    if tag == "tgt":
        return f"t{ep[1]}"
    return f"{'o' if tag == 'out' else 'i'}{ep[1]}.{ep[2]}"


def _ep_parse(s: str):
    try:
        if s[0] in "st":
            return ("src" if s[0] == "s" else "tgt", int(s[1:]))
        if s[0] in "oi":
            n, k = s[1:].split(".")
            return ("out" if s[0] == "o" else "in", int(n), int(k))
    except (ValueError, IndexError):
        pass
    raise TraceError(f"bad endpoint {s!r} in move log")


def _join(items, fmt) -> str:
    return ",".join(fmt(x) for x in items) if items else "-"


def _split(field: str, parse_one) -> tuple:
    if field == "-":
        return ()
    return tuple(parse_one(x) for x in field.split(","))


def format_move(step: int, mv: Move) -> str:
    return " ".join([str(step), mv.rule, "rev" if mv.reverse else "fwd",
                     _join(mv.nodes, str), _join(mv.src_prod, _ep_str),
                     _join(mv.tgt_cons, _ep_str)])


def parse_move(line: str) -> tuple:
    parts = line.split()
    if len(parts) != 6 or parts[2] not in ("fwd", "rev"):
        raise TraceError(f"bad move line {line!r}")
    step = int(parts[0])
    mv = Move(parts[1], parts[2] == "rev", _split(parts[3], int),
              _split(parts[4], _ep_parse), _split(parts[5], _ep_parse))
    return step, mv


def trace_text(trace: MoveTrace) -> str:
    lines = ["ocbord-trace 1", "initial-begin",
             render(trace.initial).rstrip("\n"), "initial-end"]
    for i, mv in enumerate(trace.moves, 1):
        lines.append(format_move(i, mv))
    lines += ["final-begin", render(trace.final).rstrip("\n"), "final-end"]
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> MoveTrace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split() != ["ocbord-trace", "1"]:
        raise TraceError("not a move log: missing 'ocbord-trace 1' header")

    def block(start, opener, closer):
        if start >= len(lines) or lines[start].strip() != opener:
            raise TraceError(f"expected {opener!r} in move log")
        body = []
        i = start + 1
        while i < len(lines) and lines[i].strip() != closer:
            body.append(lines[i])
            i += 1
        if i == len(lines):
            raise TraceError(f"missing {closer!r} in move log")
        return "\n".join(body) + "\n", i + 1

    initial_text, i = block(1, "initial-begin", "initial-end")
    moves = []
    while i < len(lines) and lines[i].strip() != "final-begin":
        step, mv = parse_move(lines[i])
        if step != len(moves) + 1:
            raise TraceError(f"move steps out of order at {lines[i]!r}")
        moves.append(mv)
        i += 1
    final_text, i = block(i, "final-begin", "final-end")
    if i != len(lines):
        raise TraceError("trailing junk after move log")
    return MoveTrace(parse(initial_text), tuple(moves), parse(final_text))


def write_trace(trace: MoveTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trace_text(trace))


def read_trace(path) -> MoveTrace:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read())


def check_trace(trace: MoveTrace) -> bool:
    """Replay a move log from scratch and verify every step.

    Each recorded site is re-matched against the replayed diagram, so a
    log edited to use a rule where it does not apply is rejected.  The
    replayed result must equal the recorded final diagram.
    """
    g = to_port_graph(trace.initial)
    g.validate()
    for step, mv in enumerate(trace.moves, 1):
        if mv.rule not in rules():
            raise TraceError(f"step {step}: unknown rule {mv.rule!r}")
        found = None
        for m in find_matches(g, mv.rule, mv.reverse, at=mv.nodes):
            if m.src_prod == mv.src_prod and m.tgt_cons == mv.tgt_cons:
                found = m
                break
        if found is None:
            raise TraceError(
                f"step {step}: {mv.rule} does not match at the recorded site")
        g = apply_match(g, found)
    if not graph_eq(g, to_port_graph(trace.final)):
        raise TraceError("replayed moves do not produce the recorded "
                         "final diagram")
    return True


# --- normalization strategy ---------------------------------------------

class _Recorder:
    def __init__(self, g: PortGraph):
        self.g = g
        self.moves: list = []

    def apply(self, m: Match) -> list:
        self.g, new = _apply_full(self.g, m)
        self.moves.append(_move_of(m))
        return new

    def do(self, rule_id: str, reverse: bool, nodes) -> list:
        ms = find_matches(self.g, rule_id, reverse, at=tuple(nodes))
        if not ms:
            raise StrategyStuck(f"{rule_id} does not apply at {nodes}")
        return self.apply(ms[0])

    def try_first(self, rule_id: str, reverse: bool = False) -> bool:
        ms = find_matches(self.g, rule_id, reverse)
        if not ms:
            return False
        self.apply(ms[0])
        return True


def _heights(g: PortGraph) -> dict:
    memo: dict = {}

    def h(nid):
        if nid in memo:
            return memo[nid]
        tot = 1
        for k in range(len(g.nodes[nid].target)):
            cons = g.out_to_in[("out", nid, k)]
            if cons[0] == "in":
                tot += h(cons[1])
        memo[nid] = tot
        return tot

    for n in sorted(g.nodes):
        h(n)
    return memo


def _chase_to_cozip(g: PortGraph, prod, where: str) -> int:
    while True:
        cons = g.out_to_in[prod]
        if cons[0] != "in":
            raise StrategyStuck(f"{where}: open strand reaches the boundary")
        kind = g.nodes[cons[1]].kind
        if kind == "cozip":
            return cons[1]
        if kind != "mu_A":
            raise StrategyStuck(f"{where}: open strand blocked by {kind}")
        prod = ("out", cons[1], 0)


def _tree_leaves(g: PortGraph, prod, kind: str) -> list:
    if prod[0] == "out" and prod[1] in g.nodes \
            and g.nodes[prod[1]].kind == kind:
        n = prod[1]
        return (_tree_leaves(g, g.in_to_out[("in", n, 0)], kind)
                + _tree_leaves(g, g.in_to_out[("in", n, 1)], kind))
    return [prod]


def _left_comb(rec: _Recorder, root_cons, kind: str, assoc_rule: str):
    # reassociate the tree above root_cons into ((l1 l2) l3) .. shape
    while True:
        site = None
        stack = [rec.g.in_to_out[root_cons]]
        while stack:
            prod = stack.pop()
            if prod[0] != "out" or rec.g.nodes[prod[1]].kind != kind:
                continue
            n = prod[1]
            in1 = rec.g.in_to_out[("in", n, 1)]
            if in1[0] == "out" and rec.g.nodes[in1[1]].kind == kind:
                site = (in1[1], n)
                break
            stack.append(rec.g.in_to_out[("in", n, 0)])
        if site is None:
            return
        rec.do(assoc_rule, True, site)


def _rotate_comb(rec: _Recorder, cz: int) -> int:
    """Move the last leaf of the comb under cozip ``cz`` to the front."""
    top = rec.g.in_to_out[("in", cz, 0)]
    new = rec.do("cozip_mul_rot", False, (top[1], cz))
    cz = new[1]
    _left_comb(rec, ("in", cz, 0), "mu_A", "assoc_A")
    return cz


def _phase_boundary(rec: _Recorder):
    # open counits become cozip + closed counit; open units become
    # zipped closed units
    while rec.try_first("counit_to_cozip"):
        pass
    while rec.try_first("ziphom_unit", reverse=True):
        pass


def _phase_open(rec: _Recorder):
    # alternate zip staging with comultiplication elimination: staging
    # keeps every zip off the open products, which in turn keeps the
    # frobenius moves below applicable (any blocking path would have to
    # re-enter the open sector through a zip)
    guard = 0
    while True:
        _phase_zip(rec)
        deltas = [n for n in sorted(rec.g.nodes)
                  if rec.g.nodes[n].kind == "Delta_A"]
        if not deltas:
            return
        guard += 1
        if guard > 10000:
            raise StrategyStuck("open comultiplication elimination "
                                "did not terminate")
        hs = _heights(rec.g)
        d = min(deltas, key=lambda n: (hs[n], n))
        cz0 = _chase_to_cozip(rec.g, ("out", d, 0), "comult elimination")
        cz1 = _chase_to_cozip(rec.g, ("out", d, 1), "comult elimination")
        if cz0 == cz1:
            _comult_one_cozip(rec, d, cz0)
        else:
            _comult_two_cozips(rec, d, cz0, cz1)


def _spin_until(rec: _Recorder, cz: int, want) -> int:
    """Rotate the comb under ``cz`` until ``want(leaves)`` holds."""
    root = ("in", cz, 0)
    leaves = _tree_leaves(rec.g, rec.g.in_to_out[root], "mu_A")
    for _ in range(len(leaves) + 1):
        if want(leaves):
            return cz
        cz = _rotate_comb(rec, cz)
        root = ("in", cz, 0)
        leaves = _tree_leaves(rec.g, rec.g.in_to_out[root], "mu_A")
    raise StrategyStuck("comb rotation did not reach the wanted leaf")


def _comult_one_cozip(rec: _Recorder, d: int, cz: int):
    # both legs reach the same cozip: rotate the second leg to the
    # front, absorb everything between the legs, then fold by cardy
    _left_comb(rec, ("in", cz, 0), "mu_A", "assoc_A")
    cz = _spin_until(rec, cz, lambda ls: ls[0] == ("out", d, 1))
    guard = 0
    while True:
        leaves = _tree_leaves(rec.g, rec.g.in_to_out[("in", cz, 0)], "mu_A")
        if leaves[1] == ("out", d, 0):
            break
        guard += 1
        if guard > len(leaves) + 2:
            raise StrategyStuck("leg absorption did not converge")
        b = rec.g.out_to_in[("out", d, 1)][1]
        d = rec.do("frobL_A", False, (d, b))[1]
    b = rec.g.out_to_in[("out", d, 1)][1]
    rec.do("cardy", True, (d, b))


def _comult_two_cozips(rec: _Recorder, d: int, cz0: int, cz1: int):
    # legs reach different cozips: bring each leg directly under its
    # cozip, then split off a closed comultiplication
    if rec.g.in_to_out[("in", cz0, 0)] != ("out", d, 0):
        _left_comb(rec, ("in", cz0, 0), "mu_A", "assoc_A")
        cz0 = _spin_until(rec, cz0, lambda ls: ls[-1] == ("out", d, 0))
        top = rec.g.in_to_out[("in", cz0, 0)]
        d = rec.do("frobR_A", False, (d, top[1]))[1]
    if rec.g.in_to_out[("in", cz1, 0)] != ("out", d, 1):
        _left_comb(rec, ("in", cz1, 0), "mu_A", "assoc_A")
        cz1 = _spin_until(rec, cz1, lambda ls: ls[0] == ("out", d, 1))
        guard = 0
        while rec.g.in_to_out[("in", cz1, 0)] != ("out", d, 1):
            guard += 1
            if guard > 1000:
                raise StrategyStuck("leg absorption did not converge")
            b = rec.g.out_to_in[("out", d, 1)][1]
            d = rec.do("frobL_A", False, (d, b))[1]
    rec.do("comul_to_cozips", False, (d, cz0, cz1))


def _phase_zip(rec: _Recorder):
    # walk zips down the open products until each one feeds a cozip;
    # a zip resting on a comultiplication stays put for now (the
    # comultiplication is eliminated later, then staging resumes)
    guard = 0
    progress = True
    while progress:
        guard += 1
        if guard > 20000:
            raise StrategyStuck("zip staging did not terminate")
        progress = False
        for z in sorted(rec.g.nodes):
            gen = rec.g.nodes.get(z)
            if gen is None or gen.kind != "zip":
                continue
            zc = rec.g.out_to_in[("out", z, 0)]
            if zc[0] != "in" or rec.g.nodes[zc[1]].kind != "mu_A":
                continue
            m, k = zc[1], zc[2]
            other = rec.g.in_to_out[("in", m, 1 - k)]
            if other[0] == "out" and rec.g.nodes[other[1]].kind == "zip":
                pair = (z, other[1], m) if k == 0 else (other[1], z, m)
                rec.do("ziphom_mul", True, pair)
            elif k == 0:
                rec.do("zipcenter", False, (z, m))
            else:
                cons = rec.g.out_to_in[("out", m, 0)]
                if cons[0] != "in":
                    raise StrategyStuck("open strand reaches the boundary")
                kind = rec.g.nodes[cons[1]].kind
                if kind == "cozip":
                    rec.do("cozip_absorb_zip", False, (z, m, cons[1]))
                elif kind == "mu_A":
                    rec.do("assoc_A", cons[2] == 1, (m, cons[1]))
                else:
                    continue        # resting on a comultiplication
            progress = True
            break


def _closed_frob_step(rec: _Recorder) -> bool:
    g = rec.g
    for s in sorted(g.nodes):
        if g.nodes[s].kind != "Delta_C":
            continue
        c0 = g.out_to_in[("out", s, 0)]
        c1 = g.out_to_in[("out", s, 1)]
        both = (c0[0] == "in" and c1[0] == "in" and c0[1] == c1[1]
                and g.nodes[c0[1]].kind == "mu_C")
        if both:
            if c0[2] == 1:      # crossed handle: straighten it
                rec.do("comm_C", True, (c0[1],))
                return True
            continue            # straight handle: a genus macro
        for k, ck in ((1, c1), (0, c0)):
            if ck[0] != "in" or g.nodes[ck[1]].kind != "mu_C":
                continue
            m, j = ck[1], ck[2]
            # the split and the merge may be joined elsewhere too; then
            # merging here would pinch a loop, so slide that other
            # material out of the way first
            other_cons = g.out_to_in[("out", s, 1 - k)]
            other_prod = g.in_to_out[("in", m, 1 - j)]
            if other_cons[0] == "in" and other_prod[0] == "out" \
                    and _reaches(g, other_cons[1], {other_prod[1]}):
                continue
            sid, mid = s, m
            if k == 0:
                sid = rec.do("cocomm_C", True, (s,))[0]
            if j == 1:
                mid = rec.do("comm_C", True, (m,))[0]
            rec.do("frobL_C", False, (sid, mid))
            return True
    return False


def _macros(g: PortGraph) -> list:
    """Window and handle pairs: (kind, nodes, input cons, output prod)."""
    out = []
    for n in sorted(g.nodes):
        gen = g.nodes[n]
        if gen.kind == "zip":
            cons = g.out_to_in[("out", n, 0)]
            if cons[0] == "in" and g.nodes[cons[1]].kind == "cozip":
                out.append(("W", (n, cons[1]), ("in", n, 0),
                            ("out", cons[1], 0)))
        elif gen.kind == "Delta_C":
            c0 = g.out_to_in[("out", n, 0)]
            c1 = g.out_to_in[("out", n, 1)]
            if (c0[0] == "in" and c1[0] == "in" and c0[1] == c1[1]
                    and g.nodes[c0[1]].kind == "mu_C"
                    and c0[2] == 0 and c1[2] == 1):
                out.append(("G", (n, c0[1]), ("in", n, 0),
                            ("out", c0[1], 0)))
    return out


def _macro_step(rec: _Recorder) -> bool:
    g = rec.g
    for kind, nodes, mi, mo in _macros(g):
        cons = g.out_to_in[mo]
        if cons[0] == "in" and g.nodes[cons[1]].kind == "mu_C":
            side = "l" if cons[2] == 0 else "r"
            base = "handle_slide_mul_" if kind == "G" else "window_slide_mul_"
            rec.do(base + side, False, nodes + (cons[1],))
            return True
        prod = g.in_to_out[mi]
        if prod[0] == "out" and g.nodes[prod[1]].kind == "Delta_C":
            side = "l" if prod[2] == 0 else "r"
            base = "handle_slide_comul_" if kind == "G" \
                else "window_slide_comul_"
            rec.do(base + side, True, (prod[1],) + nodes)
            return True
    for kind, nodes, mi, mo in _macros(g):
        if kind != "G":
            continue
        cons = g.out_to_in[mo]
        if cons[0] == "in" and g.nodes[cons[1]].kind == "zip":
            z = cons[1]
            zc = g.out_to_in[("out", z, 0)]
            if zc[0] == "in" and g.nodes[zc[1]].kind == "cozip":
                rec.do("window_handle_swap", False, nodes + (z, zc[1]))
                return True
    for kind, nodes, mi, mo in _macros(g):
        if kind != "W":
            continue
        cons = g.out_to_in[mo]
        if cons[0] == "in" and g.nodes[cons[1]].kind == "zip":
            z2 = cons[1]
            c2 = g.out_to_in[("out", z2, 0)]
            if c2[0] == "in" and g.nodes[c2[1]].kind == "cozip":
                if g.nodes[nodes[0]].colors[0] > g.nodes[z2].colors[0]:
                    rec.do("window_swap", False, nodes + (z2, c2[1]))
                    return True
    return False


def _phase_closed(rec: _Recorder):
    guard = 0
    while True:
        guard += 1
        if guard > 50000:
            raise StrategyStuck("closed tidying did not terminate")
        if rec.try_first("unitL_C"):
            continue
        if rec.try_first("unitR_C"):
            continue
        if rec.try_first("counitL_C"):
            continue
        if rec.try_first("counitR_C"):
            continue
        if _closed_frob_step(rec):
            continue
        if _macro_step(rec):
            continue
        return


def _comb_mus(g: PortGraph, root_prod, kind: str) -> list:
    """The spine of a left comb, bottom (root) to top."""
    spine = []
    prod = root_prod
    while prod[0] == "out" and g.nodes[prod[1]].kind == kind:
        spine.append(prod[1])
        prod = g.in_to_out[("in", prod[1], 0)]
    return spine


def _sort_mu_comb(rec: _Recorder, root_cons, kind: str, assoc_rule: str,
                  comm_rule: str, key):
    """Sort the leaves of the comb above ``root_cons`` ascending by key."""
    guard = 0
    while True:
        guard += 1
        if guard > 5000:
            raise StrategyStuck("comb sorting did not converge")
        prod = rec.g.in_to_out[root_cons]
        leaves = _tree_leaves(rec.g, prod, kind)
        keys = [key(lf) for lf in leaves]
        pos = next((i for i in range(len(keys) - 1)
                    if keys[i] > keys[i + 1]), None)
        if pos is None:
            return
        spine = _comb_mus(rec.g, prod, kind)      # bottom to top
        spine.reverse()                           # top to bottom: mu_1..mu_k
        if pos == 0:
            rec.do(comm_rule, True, (spine[0],))
        else:
            upper, lower = spine[pos - 1], spine[pos]
            new = rec.do(assoc_rule, False, (upper, lower))
            inner = rec.do(comm_rule, True, (new[0],))[0]
            rec.do(assoc_rule, True, (inner, new[1]))


def _phase_canonical(rec: _Recorder):
    # open blocks: left comb with the smallest source port leading
    for cz in [n for n in sorted(rec.g.nodes)
               if rec.g.nodes[n].kind == "cozip"]:
        if cz not in rec.g.nodes:
            continue
        prod = rec.g.in_to_out[("in", cz, 0)]
        if prod[0] == "out" and rec.g.nodes[prod[1]].kind == "zip":
            continue            # window, not a block
        _left_comb(rec, ("in", cz, 0), "mu_A", "assoc_A")
        leaves = _tree_leaves(rec.g, rec.g.in_to_out[("in", cz, 0)], "mu_A")
        if len(leaves) > 1:
            _spin_until(rec, cz, lambda ls: ls[0] == min(ls))

    # closed merges: left comb sorted by each block's smallest port
    def block_min(leaf):
        if leaf[0] != "out" or rec.g.nodes[leaf[1]].kind != "cozip":
            raise StrategyStuck("closed merge leaf is not a block")
        tree = rec.g.in_to_out[("in", leaf[1], 0)]
        return min(lf[1] for lf in _tree_leaves(rec.g, tree, "mu_A"))

    roots = []
    for n in sorted(rec.g.nodes):
        if rec.g.nodes[n].kind != "mu_C":
            continue
        p0 = rec.g.in_to_out[("in", n, 0)]
        p1 = rec.g.in_to_out[("in", n, 1)]
        if p0[0] == "out" and p1[0] == "out" and p0[1] == p1[1]:
            continue            # the cap of a handle, not a merge
        cons = rec.g.out_to_in[("out", n, 0)]
        if cons[0] == "in" and rec.g.nodes[cons[1]].kind == "mu_C":
            continue
        roots.append(cons)
    for root_cons in roots:
        _left_comb(rec, root_cons, "mu_C", "assoc_C")
        _sort_mu_comb(rec, root_cons, "mu_C", "assoc_C", "comm_C", block_min)

    # closed splits: spine along the first leg, outputs sorted so the
    # lowest target hangs off the deepest comultiplication
    _canonical_splits(rec)


def _is_handle(g: PortGraph, s: int) -> bool:
    c0 = g.out_to_in[("out", s, 0)]
    c1 = g.out_to_in[("out", s, 1)]
    return (c0[0] == "in" and c1[0] == "in" and c0[1] == c1[1]
            and g.nodes[c0[1]].kind == "mu_C")


def _canonical_splits(rec: _Recorder):
    tops = []
    for n in sorted(rec.g.nodes):
        if rec.g.nodes[n].kind != "Delta_C" or _is_handle(rec.g, n):
            continue
        prod = rec.g.in_to_out[("in", n, 0)]
        if prod[0] == "out" and rec.g.nodes[prod[1]].kind == "Delta_C" \
                and not _is_handle(rec.g, prod[1]):
            continue
        tops.append(rec.g.in_to_out[("in", n, 0)])   # stable anchor above
    for anchor in tops:
        _canonical_one_split(rec, anchor)


def _split_spine(g: PortGraph, anchor) -> list:
    spine = []
    cons = g.out_to_in[anchor]
    while cons[0] == "in" and g.nodes[cons[1]].kind == "Delta_C" \
            and not _is_handle(g, cons[1]):
        spine.append(cons[1])
        cons = g.out_to_in[("out", cons[1], 0)]
    return spine


def _canonical_one_split(rec: _Recorder, anchor):
    # reassociate into a spine chained along first legs
    guard = 0
    while True:
        guard += 1
        if guard > 5000:
            raise StrategyStuck("split combing did not converge")
        site = None
        stack = [rec.g.out_to_in[anchor]]
        while stack:
            cons = stack.pop()
            if cons[0] != "in" or rec.g.nodes[cons[1]].kind != "Delta_C" \
                    or _is_handle(rec.g, cons[1]):
                continue
            n = cons[1]
            c1 = rec.g.out_to_in[("out", n, 1)]
            if c1[0] == "in" and rec.g.nodes[c1[1]].kind == "Delta_C" \
                    and not _is_handle(rec.g, c1[1]):
                site = (n, c1[1])
                break
            stack.append(rec.g.out_to_in[("out", n, 0)])
        if site is None:
            break
        rec.do("coassoc_C", True, site)

    guard = 0
    while True:
        guard += 1
        if guard > 5000:
            raise StrategyStuck("split sorting did not converge")
        spine = _split_spine(rec.g, anchor)
        if not spine:
            return
        leaves = [("out", n, 1) for n in spine] + [("out", spine[-1], 0)]
        cur = []
        for lf in leaves:
            cons = rec.g.out_to_in[lf]
            if cons[0] != "tgt":
                raise StrategyStuck("split leg does not reach the boundary")
            cur.append(cons[1])
        pos = next((i for i in range(len(cur) - 1)
                    if cur[i] < cur[i + 1]), None)
        if pos is None:
            return
        if pos == len(cur) - 2:
            rec.do("cocomm_C", True, (spine[-1],))
        else:
            upper, lower = spine[pos], spine[pos + 1]
            new = rec.do("coassoc_C", False, (upper, lower))
            hang = rec.do("cocomm_C", True, (new[1],))[0]
            rec.do("coassoc_C", True, (new[0], hang))


def normalize_with_trace(x):
    """Normalize a diagram by recorded rule applications.

    Returns ``(normal form, trace)``.  The trace acts on the wrapped
    diagram; its final entry is the wrapped normal form, and the returned
    term is the unwrapped result, which equals :func:`normal_form` of the
    input.  A diagram already in normal form yields an empty move list.
    """
    t = x if isinstance(x, DiagramTerm) else from_port_graph(x)
    t.validate()
    nf = normal_form(t)
    wt, w = wrap(t)
    if syntactic_eq(t, nf):
        return t, MoveTrace(wt, (), wt)
    g = to_port_graph(wt)
    target = nf_wrapped_graph(invariants(g))
    rec = _Recorder(g)
    _phase_boundary(rec)
    _phase_open(rec)
    _phase_closed(rec)
    _phase_canonical(rec)
    if not graph_eq(rec.g, target):
        raise StrategyStuck("normalization reached an unexpected shape; "
                            "the move log so far is still sound")
    final = from_port_graph(rec.g)
    return unwrap(final, w), MoveTrace(wt, tuple(rec.moves), final)


def normalize(x) -> DiagramTerm:
    """Normal form computed by recorded rewriting; see
    :func:`normalize_with_trace`."""
    return normalize_with_trace(x)[0]
