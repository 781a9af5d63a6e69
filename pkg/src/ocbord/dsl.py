"""Text format for cobordism diagrams (``.ocd`` files).

Grammar, informally::

    file  ::= [ "colors" name ("," name)* ]  "source" seglist  row*
    row   ::= atom ("|" atom)*
    seg   ::= "O" | "I" | "I[" name "," name "]"

Statements are separated by newlines or ``;``.  ``#`` starts a line
comment.  Atoms are the ten generators (``mu_A[a,b,c]``, ``eta_A[a]``,
``Delta_A[a,b,c]``, ``eps_A[a]``, ``mu_C``, ``eta_C``, ``Delta_C``,
``eps_C``, ``zip[a]``, ``cozip[a]``), identities ``id:O`` / ``id:I[a,b]``,
crossings ``cross(seg,seg)``, and macros that expand to composites:
six saddles, ``window_o`` (hole in a strip), ``window_c`` (hole through a
closed sheet) and ``window_w`` (free window on a circle).  Colour
brackets may be omitted; a bare atom uses the colour ``*``.

Within a row the atoms bind left to right against the current boundary;
an atom with empty source (``eta_A``, ``eta_C``) sits at the cursor
position between its neighbours' wires.

>>> t = parse("source I,I ; mu_A ; Delta_A")
>>> print(render(t), end="")
source I, I
mu_A
Delta_A
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagram import (
    Cross,
    DiagramTerm,
    Gen,
    Id,
    OcbordError,
    Seg,
    TypingError,
    compose,
    fmt_obj,
    gen_term,
    identity_term,
    tensor,
    DEFAULT_COLOR,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


class ParseError(OcbordError):
    def __init__(self, msg: str, span: SourceSpan = None):
        self.span = span
        super().__init__(f"{span}: {msg}" if span else msg)


class TypeMismatch(ParseError):
    """Rows parsed fine but do not compose (boundary objects disagree)."""


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_ATOM_RE = re.compile(rf"^({_NAME})(?:\[([^\]]*)\]|\((.*)\))?$")


def _split_top(text: str, sep: str = ","):
    """Split on ``sep`` outside brackets; returns [] for blank input."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    parts = [p.strip() for p in parts]
    if parts == [""]:
        return []
    return parts


def _parse_seg(text: str, span: SourceSpan) -> Seg:
    text = text.strip()
    if text == "O":
        return Seg.O()
    if text == "I":
        return Seg.I()
    m = re.match(rf"^I\[\s*({_NAME}|\*)\s*,\s*({_NAME}|\*)\s*\]$", text)
    if not m:
        raise ParseError(f"bad segment {text!r} (want O, I or I[a,b])", span)
    return Seg.I(m.group(1), m.group(2))


def _colors(arg: str, want: int, atom: str, span: SourceSpan) -> tuple:
    if arg is None:
        return (DEFAULT_COLOR,) * want
    names = _split_top(arg)
    if len(names) != want:
        raise ParseError(
            f"{atom} takes {want} colour(s), got {len(names)}", span)
    for n in names:
        if n != "*" and not re.fullmatch(_NAME, n):
            raise ParseError(f"bad colour name {n!r}", span)
    return tuple(names)


_GEN_ARITY = {"mu_A": 3, "eta_A": 1, "Delta_A": 3, "eps_A": 1,
              "mu_C": 0, "eta_C": 0, "Delta_C": 0, "eps_C": 0,
              "zip": 1, "cozip": 1}


def _macro(name: str, arg: str, span: SourceSpan) -> DiagramTerm:
    """Expand one macro atom to its defining composite."""
    def g(kind, *cols):
        return gen_term(Gen(kind, tuple(cols)))

    def idt(seg):
        return identity_term((seg,))

    if name == "window_o":
        # hole in a strip: split, then rejoin around the window colour
        names = _split_top(arg) if arg is not None else []
        if len(names) == 0:
            a = s = b = DEFAULT_COLOR
        elif len(names) == 2:
            a, b = names
            s = a
        elif len(names) == 3:
            a, s, b = names
        else:
            raise ParseError("window_o takes 0, 2 or 3 colours", span)
        return compose(g("Delta_A", a, s, b), g("mu_A", a, s, b))
    if name == "window_c":
        if arg is not None:
            raise ParseError("window_c takes no colours", span)
        return compose(g("Delta_C"), g("mu_C"))
    if name == "window_w":
        (a,) = _colors(arg, 1, name, span)
        return compose(g("zip", a), g("cozip", a))
    if name in ("saddle_cross_l", "saddle_cross_r"):
        a, b, c, d = _colors(arg, 4, name, span)
        if name == "saddle_cross_l":
            top = tensor(g("Delta_A", a, b, c), idt(Seg.I(b, d)))
            mid = tensor(idt(Seg.I(a, b)), DiagramTerm(
                (Seg.I(b, c), Seg.I(b, d)),
                ((Cross(Seg.I(b, c), Seg.I(b, d)),),)))
            bot = tensor(g("mu_A", a, b, d), idt(Seg.I(b, c)))
        else:
            top = tensor(idt(Seg.I(d, b)), g("Delta_A", a, b, c))
            mid = tensor(DiagramTerm(
                (Seg.I(d, b), Seg.I(a, b)),
                ((Cross(Seg.I(d, b), Seg.I(a, b)),),)), idt(Seg.I(b, c)))
            bot = tensor(idt(Seg.I(a, b)), g("mu_A", d, b, c))
        return compose(compose(top, mid), bot)
    if name in ("saddle_zip_l", "saddle_zip_r"):
        a, b = _colors(arg, 2, name, span)
        if name == "saddle_zip_l":
            return compose(tensor(g("zip", a), idt(Seg.I(a, b))),
                           g("mu_A", a, a, b))
        return compose(tensor(idt(Seg.I(a, b)), g("zip", b)),
                       g("mu_A", a, b, b))
    if name in ("saddle_cozip_l", "saddle_cozip_r"):
        a, b = _colors(arg, 2, name, span)
        if name == "saddle_cozip_l":
            return compose(g("Delta_A", a, a, b),
                           tensor(g("cozip", a), idt(Seg.I(a, b))))
        return compose(g("Delta_A", a, b, b),
                       tensor(idt(Seg.I(a, b)), g("cozip", b)))
    raise ParseError(f"unknown atom {name!r}", span)


def _parse_atom(text: str, span: SourceSpan) -> DiagramTerm:
    text = text.strip()
    if text.startswith("id:"):
        return identity_term((_parse_seg(text[3:], span),))
    m = _ATOM_RE.match(text)
    if not m:
        raise ParseError(f"bad atom {text!r}", span)
    name, brack, paren = m.group(1), m.group(2), m.group(3)
    if name == "cross":
        if paren is None:
            raise ParseError("cross needs two segments: cross(x,y)", span)
        args = _split_top(paren)
        if len(args) != 2:
            raise ParseError("cross takes exactly two segments", span)
        x, y = (_parse_seg(a, span) for a in args)
        return DiagramTerm((x, y), ((Cross(x, y),),))
    if paren is not None:
        raise ParseError(f"{name} takes [..] colour brackets, not (..)", span)
    if name in _GEN_ARITY:
        cols = _colors(brack, _GEN_ARITY[name], name, span)
        return gen_term(Gen(name, cols))
    return _macro(name, brack, span)


def _statements(text: str, filename: str):
    """Yield (statement_text, span) with comments stripped."""
    for ln, line in enumerate(text.splitlines(), start=1):
        if "#" in line:
            line = line[:line.index("#")]
        col = 1
        for piece in line.split(";"):
            stripped = piece.strip()
            if stripped:
                yield stripped, SourceSpan(filename, ln,
                                           col + len(piece) - len(piece.lstrip()))
            col += len(piece) + 1


def parse(text: str, filename: str = "<string>") -> DiagramTerm:
    """Parse ``.ocd`` text into a validated :class:`DiagramTerm`."""
    palette = None
    source = None
    term = None
    for stmt, span in _statements(text, filename):
        head = stmt.split(None, 1)[0]
        rest = stmt[len(head):].strip()
        if head == "colors":
            if source is not None or palette is not None:
                raise ParseError("colors header must come first, once", span)
            palette = _split_top(rest)
            for n in palette:
                if not re.fullmatch(_NAME, n):
                    raise ParseError(f"bad colour name {n!r}", span)
            continue
        if head == "source":
            if source is not None:
                raise ParseError("duplicate source line", span)
            source = tuple(_parse_seg(s, span) for s in _split_top(rest))
            term = DiagramTerm(source, ())
            continue
        if source is None:
            raise ParseError("expected a source line before rows", span)
        row = None
        for atom_text in _split_top(stmt, "|"):
            at = _parse_atom(atom_text, span)
            row = at if row is None else tensor(row, at)
        try:
            term = compose(term, row)
        except TypingError as e:
            raise TypeMismatch(str(e), span) from None
    if source is None:
        raise ParseError("no source line", SourceSpan(filename, 1, 1))
    if palette is not None:
        allowed = set(palette) | {DEFAULT_COLOR}
        used = _used_colors(term)
        bad = used - allowed
        if bad:
            raise ParseError(
                f"colour(s) {sorted(bad)} not declared in the colors header",
                SourceSpan(filename, 1, 1))
    term.validate()
    return term


def parse_file(path) -> DiagramTerm:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), filename=str(path))


def _used_colors(term: DiagramTerm) -> set:
    used = set()

    def seg_cols(seg):
        if seg.is_interval:
            used.add(seg.left)
            used.add(seg.right)

    for s in term.source:
        seg_cols(s)
    for sl in term.slices:
        for f in sl:
            if isinstance(f, Gen):
                used.update(f.colors)
            elif isinstance(f, Id):
                seg_cols(f.seg)
            else:
                seg_cols(f.a)
                seg_cols(f.b)
    return used


def _fold_windows(slices):
    """Merge adjacent ``zip``/``cozip`` slice pairs into window rows.

    Returns a list of rows, each a list of printable factor strings.
    """
    def lone_gen(sl, kind):
        hits = [i for i, f in enumerate(sl)
                if isinstance(f, Gen) and f.kind == kind]
        if len(hits) == 1 and all(isinstance(f, Id) or i in hits
                                  for i, f in enumerate(sl)):
            return hits[0]
        return None

    rows = []
    i = 0
    while i < len(slices):
        sl = slices[i]
        p = lone_gen(sl, "zip")
        if p is not None and i + 1 < len(slices):
            q = lone_gen(slices[i + 1], "cozip")
            zpos = sum(len(f.target) for f in sl[:p])
            qpos = None if q is None else \
                sum(len(f.source) for f in slices[i + 1][:q])
            if q is not None and zpos == qpos \
                    and slices[i + 1][q].colors == sl[p].colors:
                a = sl[p].colors[0]
                w = "window_w" if a == DEFAULT_COLOR else f"window_w[{a}]"
                rows.append([w if j == p else str(f)
                             for j, f in enumerate(sl)])
                i += 2
                continue
        rows.append([str(f) for f in sl])
        i += 1
    return rows


def render(term: DiagramTerm, fold_windows: bool = False) -> str:
    """Render a term as ``.ocd`` text.  ``parse(render(t))`` equals ``t``
    up to window folding."""
    term.validate()
    lines = []
    named = sorted(_used_colors(term) - {DEFAULT_COLOR})
    if named:
        lines.append("colors " + ", ".join(named))
    lines.append("source " + fmt_obj(term.source).replace("(empty)", ""))
    if fold_windows:
        rows = _fold_windows(term.slices)
    else:
        rows = [[str(f) for f in sl] for sl in term.slices]
    for row in rows:
        lines.append(" | ".join(row))
    return "\n".join(line.rstrip() for line in lines) + "\n"
