"""Evaluation of diagrams as exact rational linear maps.

A diagram denotes a linear map once every boundary segment is assigned a
vector space and every generator a structure map: circles go to a
commutative Frobenius algebra C, intervals I[a,b] to spaces A_ab forming
a colour-indexed symmetric Frobenius family, and zip/cozip to an algebra
map C -> A_aa and its adjoint.  Such a family (a knowledgeable Frobenius
algebra) is the :class:`KFA` record below; :func:`check_axioms` verifies
the defining equations on basis vectors and reports a witness for every
failure, and :func:`evaluate` contracts the diagram's port graph as a
sparse tensor network over exact fractions.

Matrix conventions: a map with source dimension c and target dimension r
is an r-by-c matrix acting on column vectors; tensor products index with
the leftmost factor most significant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .diagram import (
    Cross,
    DEFAULT_COLOR,
    DiagramTerm,
    Gen,
    OcbordError,
    PortGraph,
    Seg,
    compose,
    gen_term,
    identity_term,
    tensor,
    to_port_graph,
)

EVAL_DIM_CAP = 4096


class LinearMap:
    """Sparse exact-rational matrix: ``rows`` by ``cols``."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.data = {}
        if entries:
            for (r, c), v in (entries.items() if isinstance(entries, dict)
                              else entries):
                v = Fraction(v)
                if v:
                    if not (0 <= r < rows and 0 <= c < cols):
                        raise ValueError(f"entry ({r},{c}) out of range")
                    self.data[(r, c)] = v

    @staticmethod
    def identity(n: int) -> "LinearMap":
        return LinearMap(n, n, {(i, i): Fraction(1) for i in range(n)})

    @staticmethod
    def from_rows(rows) -> "LinearMap":
        r = len(rows)
        c = len(rows[0]) if rows else 0
        return LinearMap(r, c, {(i, j): Fraction(v)
                                for i, row in enumerate(rows)
                                for j, v in enumerate(row)})

    def entry(self, r: int, c: int) -> Fraction:
        return self.data.get((r, c), Fraction(0))

    def to_rows(self):
        return [[self.entry(r, c) for c in range(self.cols)]
                for r in range(self.rows)]

    def col(self, c: int):
        return tuple(self.entry(r, c) for r in range(self.rows))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in composition")
        out = {}
        by_row = {}
        for (r, c), v in other.data.items():
            by_row.setdefault(r, []).append((c, v))
        for (r, c), v in self.data.items():
            for c2, v2 in by_row.get(c, ()):
                out[(r, c2)] = out.get((r, c2), Fraction(0)) + v * v2
        return LinearMap(self.rows, other.cols, out)

    def tensor(self, other: "LinearMap") -> "LinearMap":
        out = {}
        for (r1, c1), v1 in self.data.items():
            for (r2, c2), v2 in other.data.items():
                out[(r1 * other.rows + r2, c1 * other.cols + c2)] = v1 * v2
        return LinearMap(self.rows * other.rows,
                         self.cols * other.cols, out)

    def __eq__(self, other):
        return (isinstance(other, LinearMap) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.data.items()))))

    def __repr__(self):
        return f"LinearMap({self.rows}x{self.cols}, {len(self.data)} entries)"


def _space_key(seg: Seg):
    return "C" if not seg.is_interval else ("A", seg.left, seg.right)


def _map_key(gen: Gen):
    return (gen.kind, gen.colors)


@dataclass
class KFA:
    """A (coloured) knowledgeable Frobenius algebra over the rationals.

    ``dims``/``basis`` are keyed by "C" and ("A", a, b); ``maps`` by
    (kind, colours) for each generator instance the colour set allows.
    """

    colors: tuple
    dims: dict
    basis: dict
    maps: dict
    name: str = ""

    def seg_dim(self, seg: Seg) -> int:
        key = _space_key(seg)
        if key not in self.dims:
            raise OcbordError(f"algebra has no space for segment {seg}")
        return self.dims[key]

    def obj_dim(self, segs) -> int:
        d = 1
        for s in segs:
            d *= self.seg_dim(s)
        return d

    def gen_map(self, gen: Gen) -> LinearMap:
        key = _map_key(gen)
        if key not in self.maps:
            raise OcbordError(f"algebra has no structure map for {gen}")
        return self.maps[key]

    def required_maps(self):
        for a in self.colors:
            yield Gen("eta_A", (a,))
            yield Gen("eps_A", (a,))
            yield Gen("zip", (a,))
            yield Gen("cozip", (a,))
            for b in self.colors:
                for c in self.colors:
                    yield Gen("mu_A", (a, b, c))
                    yield Gen("Delta_A", (a, b, c))
        for kind in ("mu_C", "eta_C", "Delta_C", "eps_C"):
            yield Gen(kind)

    def validate_structure(self):
        """Check every required map exists with the right shape."""
        problems = []
        for a in self.colors:
            for b in self.colors:
                if ("A", a, b) not in self.dims:
                    problems.append(f"missing space A[{a},{b}]")
        if "C" not in self.dims:
            problems.append("missing space C")
        if problems:
            return problems
        for gen in self.required_maps():
            key = _map_key(gen)
            if key not in self.maps:
                problems.append(f"missing map {gen}")
                continue
            m = self.maps[key]
            want = (self.obj_dim(gen.target), self.obj_dim(gen.source))
            if (m.rows, m.cols) != want:
                problems.append(
                    f"map {gen} has shape {m.rows}x{m.cols}, want "
                    f"{want[0]}x{want[1]}")
        return problems


def _decode(flat: int, dims):
    out = []
    for d in reversed(dims):
        if d == 0:
            raise ValueError("zero dimension")
        out.append(flat % d)
        flat //= d
    return tuple(reversed(out))


def evaluate(x, alg: KFA) -> LinearMap:
    """Contract a diagram to its linear map under ``alg``."""
    g = to_port_graph(x) if isinstance(x, DiagramTerm) else x
    g.validate()
    rows = alg.obj_dim(g.target)
    cols = alg.obj_dim(g.source)
    if rows > EVAL_DIM_CAP or cols > EVAL_DIM_CAP:
        raise OcbordError(
            f"evaluation result would be {rows}x{cols}, over the cap")

    wire_dim = {}
    for prod in g.out_to_in:
        wire_dim[prod] = alg.seg_dim(g.producer_seg(prod))

    # One sparse tensor per node; legs are wire ids (producer endpoints).
    tensors = []
    for nid, gen in g.nodes.items():
        ins = [g.in_to_out[("in", nid, k)] for k in range(len(gen.source))]
        outs = [("out", nid, k) for k in range(len(gen.target))]
        legs = ins + outs
        in_dims = [alg.seg_dim(s) for s in gen.source]
        out_dims = [alg.seg_dim(s) for s in gen.target]
        m = alg.gen_map(gen)
        data = {}
        for (r, c), v in m.data.items():
            key = _decode(c, in_dims) + _decode(r, out_dims)
            data[key] = v
        tensors.append((legs, data))
    # A wire straight from source to target has no node tensor; give it a
    # diagonal one-leg tensor so both boundary indices read the same value.
    for prod, cons in g.out_to_in.items():
        if prod[0] == "src" and cons[0] == "tgt":
            tensors.append(([prod], {(k,): Fraction(1)
                                     for k in range(wire_dim[prod])}))

    def contract(t1, t2):
        legs1, d1 = t1
        legs2, d2 = t2
        shared = [l for l in legs1 if l in set(legs2)]
        keep1 = [i for i, l in enumerate(legs1) if l not in shared]
        keep2 = [i for i, l in enumerate(legs2) if l not in shared]
        pos1 = [legs1.index(l) for l in shared]
        pos2 = [legs2.index(l) for l in shared]
        buckets = {}
        for idx, v in d2.items():
            buckets.setdefault(tuple(idx[p] for p in pos2), []).append(
                (tuple(idx[p] for p in keep2), v))
        out = {}
        for idx, v in d1.items():
            key = tuple(idx[p] for p in pos1)
            base = tuple(idx[p] for p in keep1)
            for rest, v2 in buckets.get(key, ()):
                full = base + rest
                acc = out.get(full, Fraction(0)) + v * v2
                if acc:
                    out[full] = acc
                elif full in out:
                    del out[full]
        return ([legs1[i] for i in keep1] + [legs2[i] for i in keep2], out)

    # Greedily contract the pair with the smallest resulting leg space.
    while True:
        best = None
        for i in range(len(tensors)):
            si = set(tensors[i][0])
            for j in range(i + 1, len(tensors)):
                shared = si & set(tensors[j][0])
                if not shared:
                    continue
                size = 1
                for l in set(tensors[i][0]) | set(tensors[j][0]):
                    if l not in shared:
                        size *= wire_dim[l]
                if best is None or size < best[0]:
                    best = (size, i, j)
        if best is None:
            break
        _, i, j = best
        merged = contract(tensors[i], tensors[j])
        tensors = [t for k, t in enumerate(tensors) if k not in (i, j)]
        tensors.append(merged)

    final = ([], {(): Fraction(1)})
    for t in tensors:
        final = contract(final, t)

    legs, data = final
    pos = {l: i for i, l in enumerate(legs)}
    src_wires = [("src", i) for i in range(len(g.source))]
    tgt_wires = [g.in_to_out[("tgt", j)] for j in range(len(g.target))]
    out = {}
    for idx, v in data.items():
        r = 0
        for w in tgt_wires:
            r = r * wire_dim[w] + idx[pos[w]]
        c = 0
        for w in src_wires:
            c = c * wire_dim[w] + idx[pos[w]]
        out[(r, c)] = out.get((r, c), Fraction(0)) + v
    return LinearMap(rows, cols, out)


# ---------------------------------------------------------------------------
# Axiom checking


@dataclass(frozen=True)
class AxiomFailure:
    axiom: str
    colors: tuple
    basis_index: int
    basis_label: str
    lhs_column: tuple
    rhs_column: tuple

    def __str__(self):
        cols = f"[{','.join(self.colors)}]" if self.colors else ""
        return (f"{self.axiom}{cols} fails on basis vector "
                f"{self.basis_label}: lhs {list(self.lhs_column)} != "
                f"rhs {list(self.rhs_column)}")


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    checked: int
    failures: tuple

    def __str__(self):
        if self.ok:
            return f"all {self.checked} axiom instances hold"
        lines = [f"{len(self.failures)} of {self.checked} axiom instances fail:"]
        lines += [f"  {f}" for f in self.failures]
        return "\n".join(lines)


def _axiom_terms(colors):
    """Yield (name, colours, lhs term, rhs term) for every axiom instance."""
    O = Seg.O()

    def I(a, b):
        return Seg.I(a, b)

    def t(kind, *cols):
        return gen_term(Gen(kind, tuple(cols)))

    def i(*segs):
        return identity_term(tuple(segs))

    def x(s1, s2):
        return DiagramTerm((s1, s2), ((Cross(s1, s2),),))

    S = colors
    for a in S:
        for b in S:
            yield ("unitL_A", (a, b),
                   compose(tensor(t("eta_A", a), i(I(a, b))), t("mu_A", a, a, b)),
                   i(I(a, b)))
            yield ("unitR_A", (a, b),
                   compose(tensor(i(I(a, b)), t("eta_A", b)), t("mu_A", a, b, b)),
                   i(I(a, b)))
            yield ("counitL_A", (a, b),
                   compose(t("Delta_A", a, a, b), tensor(t("eps_A", a), i(I(a, b)))),
                   i(I(a, b)))
            yield ("counitR_A", (a, b),
                   compose(t("Delta_A", a, b, b), tensor(i(I(a, b)), t("eps_A", b))),
                   i(I(a, b)))
            yield ("symm_A", (a, b),
                   compose(t("mu_A", a, b, a), t("eps_A", a)),
                   compose(x(I(a, b), I(b, a)), compose(t("mu_A", b, a, b), t("eps_A", b))))
            yield ("knowledge", (a, b),
                   compose(tensor(t("zip", a), i(I(a, b))), t("mu_A", a, a, b)),
                   compose(compose(x(O, I(a, b)), tensor(i(I(a, b)), t("zip", b))),
                           t("mu_A", a, b, b)))
            yield ("cardy", (a, b),
                   compose(t("cozip", b), t("zip", a)),
                   compose(compose(t("Delta_A", b, a, b), x(I(b, a), I(a, b))),
                           t("mu_A", a, b, a)))
            for c in S:
                for d in S:
                    yield ("assoc_A", (a, b, c, d),
                           compose(tensor(t("mu_A", a, b, c), i(I(c, d))),
                                   t("mu_A", a, c, d)),
                           compose(tensor(i(I(a, b)), t("mu_A", b, c, d)),
                                   t("mu_A", a, b, d)))
                    yield ("coassoc_A", (a, b, c, d),
                           compose(t("Delta_A", a, c, d),
                                   tensor(t("Delta_A", a, b, c), i(I(c, d)))),
                           compose(t("Delta_A", a, b, d),
                                   tensor(i(I(a, b)), t("Delta_A", b, c, d))))
                    yield ("frob_A", (a, b, c, d),
                           compose(t("mu_A", a, b, c), t("Delta_A", a, d, c)),
                           compose(tensor(i(I(a, b)), t("Delta_A", b, d, c)),
                                   tensor(t("mu_A", a, b, d), i(I(d, c)))))
                    yield ("frob_A2", (a, b, c, d),
                           compose(t("mu_A", a, b, c), t("Delta_A", a, d, c)),
                           compose(tensor(t("Delta_A", a, d, b), i(I(b, c))),
                                   tensor(i(I(a, d)), t("mu_A", d, b, c))))
    for a in S:
        yield ("ziphom_mul", (a,),
               compose(t("mu_C"), t("zip", a)),
               compose(tensor(t("zip", a), t("zip", a)), t("mu_A", a, a, a)))
        yield ("ziphom_unit", (a,),
               compose(t("eta_C"), t("zip", a)),
               t("eta_A", a))
        yield ("duality", (a,),
               compose(tensor(t("cozip", a), i(O)), compose(t("mu_C"), t("eps_C"))),
               compose(tensor(i(I(a, a)), t("zip", a)),
                       compose(t("mu_A", a, a, a), t("eps_A", a))))
    yield ("assoc_C", (),
           compose(tensor(t("mu_C"), i(O)), t("mu_C")),
           compose(tensor(i(O), t("mu_C")), t("mu_C")))
    yield ("unitL_C", (), compose(tensor(t("eta_C"), i(O)), t("mu_C")), i(O))
    yield ("unitR_C", (), compose(tensor(i(O), t("eta_C")), t("mu_C")), i(O))
    yield ("coassoc_C", (),
           compose(t("Delta_C"), tensor(t("Delta_C"), i(O))),
           compose(t("Delta_C"), tensor(i(O), t("Delta_C"))))
    yield ("counitL_C", (), compose(t("Delta_C"), tensor(t("eps_C"), i(O))), i(O))
    yield ("counitR_C", (), compose(t("Delta_C"), tensor(i(O), t("eps_C"))), i(O))
    yield ("comm_C", (), compose(x(O, O), t("mu_C")), t("mu_C"))
    yield ("cocomm_C", (), compose(t("Delta_C"), x(O, O)), t("Delta_C"))
    yield ("frob_C", (),
           compose(t("mu_C"), t("Delta_C")),
           compose(tensor(i(O), t("Delta_C")), tensor(t("mu_C"), i(O))))
    yield ("frob_C2", (),
           compose(t("mu_C"), t("Delta_C")),
           compose(tensor(t("Delta_C"), i(O)), tensor(i(O), t("mu_C"))))


def _obj_basis_label(alg: KFA, segs, flat: int) -> str:
    dims = [alg.seg_dim(s) for s in segs]
    if not dims:
        return "1"
    idx = _decode(flat, dims)
    names = []
    for s, k in zip(segs, idx):
        names.append(alg.basis[_space_key(s)][k])
    return " (x) ".join(names)


def check_axioms(alg: KFA) -> AxiomReport:
    """Verify the defining equations of a knowledgeable Frobenius algebra.

    Every axiom instance is evaluated on both sides as a linear map; the
    first differing basis column of each failing instance is reported.
    """
    structural = alg.validate_structure()
    if structural:
        fails = tuple(AxiomFailure("structure", (), -1, p, (), ())
                      for p in structural)
        return AxiomReport(False, len(structural), fails)
    failures = []
    checked = 0
    for name, cols, lhs, rhs in _axiom_terms(alg.colors):
        checked += 1
        ml = evaluate(lhs, alg)
        mr = evaluate(rhs, alg)
        if ml == mr:
            continue
        src = lhs.source
        witness = 0
        for cidx in range(max(ml.cols, 1)):
            if ml.col(cidx) != mr.col(cidx):
                witness = cidx
                break
        failures.append(AxiomFailure(
            name, cols, witness, _obj_basis_label(alg, src, witness),
            ml.col(witness), mr.col(witness)))
    return AxiomReport(not failures, checked, tuple(failures))


# ---------------------------------------------------------------------------
# Builtin examples


def _invert(gram):
    """Exact inverse of a square Fraction matrix, or None if singular."""
    n = len(gram)
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j))
                                       for j in range(n)]
         for i, row in enumerate(gram)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _derive_comult(mu: LinearMap, eps: LinearMap, dim: int) -> LinearMap:
    """Comultiplication forced by mu and eps via the counit pairing.

    Requires the pairing (u, v) -> eps(uv) to be nondegenerate; raises
    otherwise.  Delta(e_w) = sum_{u,v} (g^{-1})[u][v] (e_w e_u) (x) e_v.
    """
    gram = [[Fraction(0)] * dim for _ in range(dim)]
    for (r, c), v in mu.data.items():
        coeff = eps.entry(0, r)
        if coeff:
            u, w = divmod(c, dim)
            gram[u][w] += v * coeff
    ginv = _invert(gram)
    if ginv is None:
        raise OcbordError(
            "counit pairing is degenerate; not a Frobenius algebra")
    delta = {}
    for (r, c), v in mu.data.items():
        w, u = divmod(c, dim)
        for vv in range(dim):
            coeff = ginv[u][vv] * v
            if coeff:
                key = (r * dim + vv, w)
                delta[key] = delta.get(key, Fraction(0)) + coeff
    return LinearMap(dim * dim, dim, delta)


def builtin_matrix_example(n: int) -> KFA:
    """The n-by-n rational matrix algebra with trace counit, C = Q.

    The comultiplication is derived from the trace pairing, the zipper
    sends 1 to the identity matrix and the cozipper is the trace.
    """
    if n < 1:
        raise OcbordError("matrix example needs n >= 1")
    a = DEFAULT_COLOR
    d = n * n
    labels = tuple(f"e{i + 1}{j + 1}" for i in range(n) for j in range(n))
    mu = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                mu[(i * n + l, (i * n + j) * d + (j * n + l))] = Fraction(1)
    mu = LinearMap(d, d * d, mu)
    eta = LinearMap(d, 1, {(i * n + i, 0): Fraction(1) for i in range(n)})
    eps = LinearMap(1, d, {(0, i * n + i): Fraction(1) for i in range(n)})
    delta = _derive_comult(mu, eps, d)
    one = LinearMap.identity(1)
    maps = {
        ("mu_A", (a, a, a)): mu,
        ("eta_A", (a,)): eta,
        ("Delta_A", (a, a, a)): delta,
        ("eps_A", (a,)): eps,
        ("mu_C", ()): one,
        ("eta_C", ()): one,
        ("Delta_C", ()): one,
        ("eps_C", ()): one,
        ("zip", (a,)): LinearMap(d, 1, {(i * n + i, 0): Fraction(1)
                                        for i in range(n)}),
        ("cozip", (a,)): LinearMap(1, d, {(0, i * n + i): Fraction(1)
                                          for i in range(n)}),
    }
    return KFA(colors=(a,), dims={"C": 1, ("A", a, a): d},
               basis={"C": ("1",), ("A", a, a): labels},
               maps=maps, name=f"matrix{n}")


class Groupoid:
    """A finite groupoid given by explicit composition tables."""

    def __init__(self, objects, morphisms, comp):
        """``morphisms``: name -> (src, tgt); ``comp``: (f, g) -> name
        meaning f after g, defined exactly for tgt(g) = src(f)."""
        self.objects = tuple(objects)
        self.morphisms = dict(morphisms)
        self.comp = dict(comp)
        self._validate()

    def _validate(self):
        ms = self.morphisms
        for f, (s, t) in ms.items():
            if s not in self.objects or t not in self.objects:
                raise OcbordError(f"invalid groupoid data: {f} has unknown ends")
        for f, (fs, ft) in ms.items():
            for g, (gs, gt) in ms.items():
                if gt == fs:
                    if (f, g) not in self.comp:
                        raise OcbordError(
                            f"invalid groupoid data: missing composite {f},{g}")
                    h = self.comp[(f, g)]
                    if h not in ms or ms[h] != (gs, ft):
                        raise OcbordError(
                            f"invalid groupoid data: bad composite {f},{g}")
                elif (f, g) in self.comp:
                    raise OcbordError(
                        f"invalid groupoid data: {f},{g} not composable")
        self.identity = {}
        for x in self.objects:
            loops = [f for f, (s, t) in ms.items() if s == t == x]
            ids = [e for e in loops
                   if all(self.comp[(e, g)] == g for g, (gs, gt) in ms.items()
                          if gt == x)
                   and all(self.comp[(f, e)] == f for f, (fs, ft) in ms.items()
                           if fs == x)]
            if len(ids) != 1:
                raise OcbordError(
                    f"invalid groupoid data: object {x} lacks an identity")
            self.identity[x] = ids[0]
        for f, (s, t) in ms.items():
            invs = [g for g, (gs, gt) in ms.items()
                    if gs == t and gt == s
                    and self.comp[(f, g)] == self.identity[t]
                    and self.comp[(g, f)] == self.identity[s]]
            if not invs:
                raise OcbordError(f"invalid groupoid data: {f} has no inverse")
        self.inverse = {f: next(g for g in ms
                                if ms[g] == (ms[f][1], ms[f][0])
                                and self.comp[(f, g)] == self.identity[ms[f][1]])
                        for f in ms}
        for f in ms:
            for g in ms:
                for h in ms:
                    if (g, h) in self.comp and (f, g) in self.comp:
                        if self.comp[(f, self.comp[(g, h)])] != \
                                self.comp[(self.comp[(f, g)], h)]:
                            raise OcbordError(
                                "invalid groupoid data: not associative")

    def hom(self, src, tgt):
        return sorted(f for f, (s, t) in self.morphisms.items()
                      if s == src and t == tgt)


def groupoid_algebra(gpd: Groupoid) -> KFA:
    """The knowledgeable Frobenius algebra of a finite groupoid.

    Colours are the objects; A_ab is spanned by Hom(b, a) with
    composition as product and "coefficient of the identity" as counit;
    the comultiplication sums over factorisations.  C is the direct sum
    over connected components of the centre of the vertex group algebra
    (class sums), with counit picking 1/|G| times the identity
    coefficient; the cozipper is solved exactly from the duality law.
    """
    objs = gpd.objects
    uf = {x: x for x in objs}

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    for f, (s, t) in gpd.morphisms.items():
        uf[find(s)] = find(t)
    comp_of = {x: find(x) for x in objs}
    comps = sorted(set(comp_of.values()))

    # Per component: base object, vertex group, conjugacy classes.
    comp_data = {}
    for k in comps:
        members = sorted(x for x in objs if comp_of[x] == k)
        base = members[0]
        group = gpd.hom(base, base)
        classes = []
        left = set(group)
        while left:
            h = min(left)
            cls = sorted({gpd.comp[(gpd.comp[(g, h)], gpd.inverse[g])]
                          for g in group})
            classes.append(tuple(cls))
            left -= set(cls)
        # a transport morphism base -> x per member
        tree = {base: gpd.identity[base]}
        frontier = [base]
        while frontier:
            y = frontier.pop()
            for f, (s, t) in gpd.morphisms.items():
                if s == y and t not in tree and comp_of[t] == k:
                    tree[t] = gpd.comp[(f, tree[y])]
                    frontier.append(t)
        comp_data[k] = (members, base, group, classes, tree)

    c_basis = []
    for k in comps:
        _members, base, _group, classes, _tree = comp_data[k]
        for cls in classes:
            c_basis.append((k, cls))
    c_dim = len(c_basis)
    c_labels = tuple(f"Z[{k}:{cls[0]}]" for k, cls in c_basis)
    c_index = {kc: i for i, kc in enumerate(c_basis)}

    def class_of(k, h):
        for cls in comp_data[k][3]:
            if h in cls:
                return cls
        raise AssertionError(h)

    dims = {"C": c_dim}
    basis = {}
    for a in objs:
        for b in objs:
            hom = gpd.hom(b, a)
            dims[("A", a, b)] = len(hom)
            basis[("A", a, b)] = tuple(hom)
    basis["C"] = c_labels

    idx = {}
    for a in objs:
        for b in objs:
            idx[(a, b)] = {f: i for i, f in enumerate(basis[("A", a, b)])}

    maps = {}
    for a in objs:
        for b in objs:
            for c in objs:
                dab, dbc, dac = dims[("A", a, b)], dims[("A", b, c)], dims[("A", a, c)]
                mu = {}
                for f in basis[("A", a, b)]:
                    for h in basis[("A", b, c)]:
                        mu[(idx[(a, c)][gpd.comp[(f, h)]],
                            idx[(a, b)][f] * dbc + idx[(b, c)][h])] = Fraction(1)
                maps[("mu_A", (a, b, c))] = LinearMap(dac, dab * dbc, mu)
                delta = {}
                for f in basis[("A", a, c)]:
                    for h in basis[("A", b, c)]:
                        p = gpd.comp[(f, gpd.inverse[h])]
                        delta[(idx[(a, b)][p] * dbc + idx[(b, c)][h],
                               idx[(a, c)][f])] = Fraction(1)
                maps[("Delta_A", (a, b, c))] = LinearMap(dab * dbc, dac, delta)
    for a in objs:
        daa = dims[("A", a, a)]
        e = gpd.identity[a]
        maps[("eta_A", (a,))] = LinearMap(
            daa, 1, {(idx[(a, a)][e], 0): Fraction(1)})
        maps[("eps_A", (a,))] = LinearMap(
            1, daa, {(0, idx[(a, a)][e]): Fraction(1)})

    mu_c = {}
    for i, (k1, cls1) in enumerate(c_basis):
        for j, (k2, cls2) in enumerate(c_basis):
            if k1 != k2:
                continue
            acc = {}
            for h1 in cls1:
                for h2 in cls2:
                    h = gpd.comp[(h1, h2)]
                    acc[h] = acc.get(h, 0) + 1
            for cls in comp_data[k1][3]:
                coeff = acc.get(cls[0], 0)
                assert all(acc.get(h, 0) == coeff for h in cls), \
                    "class sum product must be central"
                if coeff:
                    mu_c[(c_index[(k1, cls)], i * c_dim + j)] = Fraction(coeff)
    maps[("mu_C", ())] = LinearMap(c_dim, c_dim * c_dim, mu_c)
    eta_c = {}
    eps_c = {}
    for k in comps:
        _m, base, group, _cl, _t = comp_data[k]
        id_cls = class_of(k, gpd.identity[base])
        eta_c[(c_index[(k, id_cls)], 0)] = Fraction(1)
        eps_c[(0, c_index[(k, id_cls)])] = Fraction(1, len(group))
    maps[("eta_C", ())] = LinearMap(c_dim, 1, eta_c)
    maps[("eps_C", ())] = LinearMap(1, c_dim, eps_c)
    maps[("Delta_C", ())] = _derive_comult(
        maps[("mu_C", ())], maps[("eps_C", ())], c_dim)

    for a in objs:
        k = comp_of[a]
        _members, base, group, classes, tree = comp_data[k]
        t_a = tree[a]
        daa = dims[("A", a, a)]
        z = {}
        for ci, (kk, cls) in enumerate(c_basis):
            if kk != k:
                continue
            for h in cls:
                image = gpd.comp[(gpd.comp[(t_a, h)], gpd.inverse[t_a])]
                z[(idx[(a, a)][image], ci)] = Fraction(1)
        maps[("zip", (a,))] = LinearMap(daa, c_dim, z)

        # cozip solved from duality: <cozip(f), c>_C = <f, zip(c)>_A
        gram = [[Fraction(0)] * c_dim for _ in range(c_dim)]
        mc, ec = maps[("mu_C", ())], maps[("eps_C", ())]
        for (r, c_), v in mc.data.items():
            w = ec.entry(0, r)
            if w:
                u, vv = divmod(c_, c_dim)
                gram[u][vv] += v * w
        ginv = _invert(gram)
        if ginv is None:
            raise OcbordError("degenerate pairing on C")
        ma = maps[("mu_A", (a, a, a))]
        ea = maps[("eps_A", (a,))]
        za = maps[("zip", (a,))]
        cz = {}
        for fi in range(daa):
            rhs = []
            for ci in range(c_dim):
                val = Fraction(0)
                for (rz, cz_), vz in za.data.items():
                    if cz_ != ci:
                        continue
                    for (rm, cm), vm in ma.data.items():
                        if cm == fi * daa + rz:
                            val += vz * vm * ea.entry(0, rm)
                rhs.append(val)
            for ci in range(c_dim):
                coeff = sum(ginv[ci][j] * rhs[j] for j in range(c_dim))
                if coeff:
                    cz[(ci, fi)] = coeff
        maps[("cozip", (a,))] = LinearMap(c_dim, daa, cz)

    return KFA(colors=tuple(objs), dims=dims, basis=basis, maps=maps,
               name="groupoid")


def _cyclic_group_groupoid(n: int, objects=("x",)) -> Groupoid:
    """Groupoid with the given objects all isomorphic, vertex group Z/n."""
    objs = tuple(objects)
    morphisms = {}
    comp = {}
    for s in objs:
        for t in objs:
            for g in range(n):
                morphisms[f"g{g}:{s}>{t}"] = (s, t)
    for f, (fs, ft) in morphisms.items():
        for h, (hs, ht) in morphisms.items():
            if ht == fs:
                gf = int(f[1:f.index(":")])
                gh = int(h[1:h.index(":")])
                comp[(f, h)] = f"g{(gf + gh) % n}:{hs}>{ft}"
    return Groupoid(objs, morphisms, comp)


def _s3_groupoid() -> Groupoid:
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
    name = {p: f"p{''.join(map(str, p))}" for p in perms}
    morphisms = {name[p]: ("x", "x") for p in perms}
    comp = {}
    for p in perms:
        for q in perms:
            pq = tuple(p[q[i]] for i in range(3))
            comp[(name[p], name[q])] = name[pq]
    return Groupoid(("x",), morphisms, comp)


def builtin_groupoid_example(which: str = "pair_z2") -> KFA:
    """Builtin groupoid algebras: ``trivial_pair``, ``z2``, ``pair_z2``,
    ``s3``, ``two_comps``."""
    if which == "trivial_pair":
        g = _cyclic_group_groupoid(1, ("a", "b"))
    elif which == "z2":
        g = _cyclic_group_groupoid(2, ("a",))
    elif which == "pair_z2":
        g = _cyclic_group_groupoid(2, ("a", "b"))
    elif which == "s3":
        g = _s3_groupoid()
    elif which == "two_comps":
        ga = _cyclic_group_groupoid(2, ("a",))
        gb = _cyclic_group_groupoid(1, ("b",))
        morphisms = dict(ga.morphisms)
        morphisms.update(gb.morphisms)
        comp = dict(ga.comp)
        comp.update(gb.comp)
        g = Groupoid(("a", "b"), morphisms, comp)
    else:
        raise OcbordError(f"unknown groupoid example {which!r}")
    alg = groupoid_algebra(g)
    alg.name = f"groupoid-{which}"
    return alg


BUILTIN_ALGEBRAS = ("matrix1", "matrix2", "matrix3",
                    "groupoid-trivial_pair", "groupoid-z2",
                    "groupoid-pair_z2", "groupoid-s3", "groupoid-two_comps")


def builtin_algebra(name: str) -> KFA:
    if name.startswith("matrix"):
        try:
            n = int(name[len("matrix"):])
        except ValueError:
            raise OcbordError(f"unknown builtin algebra {name!r}") from None
        if n < 1:
            raise OcbordError(f"unknown builtin algebra {name!r}")
        return builtin_matrix_example(n)
    if name.startswith("groupoid-"):
        return builtin_groupoid_example(name[len("groupoid-"):])
    raise OcbordError(f"unknown builtin algebra {name!r}")


# ---------------------------------------------------------------------------
# File format (.kfa)


def _frac_str(v: Fraction) -> str:
    return str(v)


def save_kfa(alg: KFA, path) -> None:
    def space_name(key):
        return key if key == "C" else f"A[{key[1]},{key[2]}]"

    def map_name(key):
        kind, cols = key
        return kind if not cols else f"{kind}[{','.join(cols)}]"

    doc = {
        "format": "kfa",
        "name": alg.name,
        "colors": list(alg.colors),
        "dims": {space_name(k): v for k, v in alg.dims.items()},
        "basis": {space_name(k): list(v) for k, v in alg.basis.items()},
        "maps": {
            map_name(k): {
                "rows": m.rows, "cols": m.cols,
                "entries": [[r, c, _frac_str(v)]
                            for (r, c), v in sorted(m.data.items())],
            } for k, m in sorted(alg.maps.items())
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_kfa(path) -> KFA:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise OcbordError(f"{path}: not valid JSON: {e}") from None
    if doc.get("format") != "kfa":
        raise OcbordError(f"{path}: missing 'format': 'kfa' marker")

    def space_key(name):
        if name == "C":
            return "C"
        if name.startswith("A[") and name.endswith("]"):
            a, b = name[2:-1].split(",")
            return ("A", a.strip(), b.strip())
        raise OcbordError(f"{path}: bad space name {name!r}")

    def map_key(name):
        if "[" in name:
            kind, rest = name.split("[", 1)
            return (kind, tuple(s.strip() for s in rest.rstrip("]").split(",")))
        return (name, ())

    try:
        colors = tuple(doc["colors"])
        dims = {space_key(k): int(v) for k, v in doc["dims"].items()}
        basis = {space_key(k): tuple(v) for k, v in doc["basis"].items()}
        maps = {}
        for name, m in doc["maps"].items():
            maps[map_key(name)] = LinearMap(
                int(m["rows"]), int(m["cols"]),
                {(int(r), int(c)): Fraction(v) for r, c, v in m["entries"]})
    except (KeyError, ValueError, TypeError) as e:
        raise OcbordError(f"{path}: malformed algebra file: {e}") from None
    alg = KFA(colors=colors, dims=dims, basis=basis, maps=maps,
              name=doc.get("name", ""))
    problems = alg.validate_structure()
    if problems:
        raise OcbordError(f"{path}: " + "; ".join(problems[:5]))
    return alg
