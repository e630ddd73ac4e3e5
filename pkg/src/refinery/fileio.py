"""Text formats for polytopes, partial maps and refinements, plus OFF export.

Polytope::

    ambient 2 field Qsqrt(5)
    V
    1 0
    -1/4+1/4*sqrt(5) 1
    ...

or an ``H`` section with rows ``a1 ... an <= b`` and ``a1 ... an == b``.
Tokens are separated by whitespace, so a scalar inside a row is written
without internal spaces.  ``#`` starts a comment.

Map::

    map source 4 target 2
    linear
    <target rows of source entries>
    offset
    <target entries>
    domain
    <polytope>

Refinement: a ``refinement`` line, then ``T`` followed by a polytope, ``f``
followed by a map and ``g`` followed by a map.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .affmap import PartialAffineMap
from .exactfield import ScalarParseError, field_of, format_scalar, parse_scalar, to_float
from .polytope import HRep, Polytope

__all__ = [
    "ParseError",
    "parse_polytope",
    "format_polytope",
    "parse_map",
    "format_map",
    "parse_refinement",
    "format_refinement",
    "read_polytope",
    "read_map",
    "export_off",
    "off_text",
]

_KEYWORDS = {"refinement", "T", "f", "g", "map", "linear", "offset", "domain", "ambient", "V", "H"}
_FIELD_RE = re.compile(r"^(?:Q|Qsqrt\((\d+)\))$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class _Line:
    number: int
    tokens: list  # (text, column)

    @property
    def head(self) -> str:
        return self.tokens[0][0]


def _lines(text: str) -> list[_Line]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]
        if toks:
            out.append(_Line(n, toks))
    return out


class _Cursor:
    def __init__(self, lines, last_line):
        self.lines = lines
        self.i = 0
        self.last_line = last_line

    def peek(self) -> _Line | None:
        return self.lines[self.i] if self.i < len(self.lines) else None

    def next(self, what: str) -> _Line:
        line = self.peek()
        if line is None:
            raise ParseError(f"unexpected end of input, expected {what}", self.last_line + 1)
        self.i += 1
        return line

    def expect(self, keyword: str) -> _Line:
        line = self.next(f"'{keyword}'")
        if line.head != keyword:
            raise ParseError(f"expected '{keyword}', found {line.head!r}", line.number,
                             line.tokens[0][1])
        return line


def _scalar(tok, line: _Line, d):
    text, col = tok
    try:
        x = parse_scalar(text)
    except ScalarParseError as exc:
        raise ParseError(str(exc), line.number, col + exc.column - 1) from None
    xd = field_of([x])
    if xd is not None and xd != d:
        field = "Q" if d is None else f"Qsqrt({d})"
        raise ParseError(f"scalar {text!r} is outside the declared field {field}", line.number, col)
    return x


def _row(line: _Line, tokens, n: int, d) -> tuple:
    if len(tokens) != n:
        col = tokens[n][1] if len(tokens) > n else (tokens[-1][1] if tokens else 1)
        raise ParseError(f"expected {n} entries, found {len(tokens)}", line.number, col)
    return tuple(_scalar(t, line, d) for t in tokens)


def _int(tok, line: _Line) -> int:
    text, col = tok
    if not text.isdigit():
        raise ParseError(f"expected a nonnegative integer, found {text!r}", line.number, col)
    return int(text)


def _polytope(cur: _Cursor) -> Polytope:
    header = cur.expect("ambient")
    toks = header.tokens
    if len(toks) != 4 or toks[2][0] != "field":
        raise ParseError("expected 'ambient <n> field <Q|Qsqrt(d)>'", header.number,
                         toks[min(len(toks) - 1, 2)][1])
    n = _int(toks[1], header)
    m = _FIELD_RE.match(toks[3][0])
    if m is None:
        raise ParseError(f"unknown field {toks[3][0]!r}", header.number, toks[3][1])
    d = int(m.group(1)) if m.group(1) else None
    section = cur.next("'V' or 'H'")
    if section.head not in ("V", "H") or len(section.tokens) != 1:
        raise ParseError("expected 'V' or 'H'", section.number, section.tokens[0][1])
    rows = []
    while cur.peek() is not None and cur.peek().head not in _KEYWORDS:
        rows.append(cur.next("row"))
    if not rows:
        raise ParseError(f"empty '{section.head}' section", section.number, 1)
    if section.head == "V":
        return Polytope.from_vertices([_row(r, r.tokens, n, d) for r in rows])
    ineqs, eqs = [], []
    for r in rows:
        if len(r.tokens) < 2 or r.tokens[-2][0] not in ("<=", "=="):
            tok = r.tokens[min(n, len(r.tokens) - 1)]
            raise ParseError("expected '<= b' or '== b' after the coefficients", r.number, tok[1])
        a = _row(r, r.tokens[:-2], n, d)
        b = _scalar(r.tokens[-1], r, d)
        (ineqs if r.tokens[-2][0] == "<=" else eqs).append((a, b))
    return Polytope.from_halfspaces(HRep(tuple(ineqs), tuple(eqs)))


def _map(cur: _Cursor) -> PartialAffineMap:
    header = cur.expect("map")
    toks = header.tokens
    if len(toks) != 5 or toks[1][0] != "source" or toks[3][0] != "target":
        raise ParseError("expected 'map source <n> target <m>'", header.number, toks[0][1])
    n, m = _int(toks[2], header), _int(toks[4], header)
    cur.expect("linear")
    linear = []
    for _ in range(m):
        line = cur.next("a row of the linear part")
        linear.append(_row(line, line.tokens, n, _any_field(line)))
    cur.expect("offset")
    line = cur.next("the offset row")
    offset = _row(line, line.tokens, m, _any_field(line))
    cur.expect("domain")
    domain = _polytope(cur)
    if domain.ambient_dim != n:
        raise ParseError(f"domain has ambient dimension {domain.ambient_dim}, map source is {n}",
                         header.number, toks[2][1])
    return PartialAffineMap(linear, offset, domain)


def _any_field(line: _Line):
    # map rows carry no field header; accept whatever field the scalars use
    for text, col in line.tokens:
        try:
            d = field_of([parse_scalar(text)])
        except ScalarParseError as exc:
            raise ParseError(str(exc), line.number, col + exc.column - 1) from None
        if d is not None:
            return d
    return None


def _run(text: str, reader):
    lines = _lines(text)
    cur = _Cursor(lines, lines[-1].number if lines else 0)
    result = reader(cur)
    rest = cur.peek()
    if rest is not None:
        raise ParseError(f"unexpected {rest.head!r}", rest.number, rest.tokens[0][1])
    return result


def parse_polytope(text: str) -> Polytope:
    return _run(text, _polytope)


def parse_map(text: str) -> PartialAffineMap:
    return _run(text, _map)


def parse_refinement(text: str) -> tuple[Polytope, PartialAffineMap, PartialAffineMap]:
    def reader(cur):
        cur.expect("refinement")
        cur.expect("T")
        T = _polytope(cur)
        cur.expect("f")
        f = _map(cur)
        cur.expect("g")
        g = _map(cur)
        return T, f, g

    return _run(text, reader)


def _field_name(values) -> str:
    d = field_of(values)
    return "Q" if d is None else f"Qsqrt({d})"


def _fmt_row(row) -> str:
    return " ".join(format_scalar(x) for x in row)


def format_polytope(P: Polytope, section: str = "V") -> str:
    if section == "V":
        body = [_fmt_row(v) for v in P.vertices]
        values = [x for v in P.vertices for x in v]
    elif section == "H":
        body = [f"{_fmt_row(a)} <= {format_scalar(b)}" for a, b in P.inequalities]
        body += [f"{_fmt_row(e)} == {format_scalar(c)}" for e, c in P.equalities]
        values = [x for a, b in P.inequalities + P.equalities for x in (*a, b)]
    else:
        raise ValueError("section must be 'V' or 'H'")
    head = f"ambient {P.ambient_dim} field {_field_name(values)}"
    return "\n".join([head, section] + body) + "\n"


def format_map(m: PartialAffineMap) -> str:
    lines = [f"map source {m.source_ambient} target {m.target_ambient}", "linear"]
    lines += [_fmt_row(r) for r in m.linear]
    lines += ["offset", _fmt_row(m.offset), "domain"]
    return "\n".join(lines) + "\n" + format_polytope(m.domain)


def format_refinement(T: Polytope, f: PartialAffineMap, g: PartialAffineMap) -> str:
    return "refinement\nT\n" + format_polytope(T) + "f\n" + format_map(f) + "g\n" + format_map(g)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def read_polytope(path: str) -> Polytope:
    return parse_polytope(_read(path))


def read_map(path: str) -> PartialAffineMap:
    return parse_map(_read(path))


# -- OFF export ---------------------------------------------------------------

def _cycle(indices, coords, normal=None):
    import numpy as np

    pts = np.array([coords[i] for i in indices])
    c = pts.mean(axis=0)
    centred = pts - c
    # an orthonormal frame of the face plane
    _, _, vt = np.linalg.svd(centred)
    u, v = vt[0], vt[1]
    angles = [math.atan2(float(p @ v), float(p @ u)) for p in centred]
    order = [i for _, i in sorted(zip(angles, indices))]
    if normal is not None and float(np.cross(u, v) @ normal) < 0:
        order = order[:1] + order[1:][::-1]
    return order


def off_text(P: Polytope, project: bool = False) -> str:
    """OFF description of a 3-polytope (decimal, 12 significant digits).

    With ``project`` a higher-dimensional polytope is mapped orthogonally
    into three dimensions; every vertex and every 2-face is written, so the
    result is a picture of the face structure rather than a convex hull.
    """
    import numpy as np

    if P.dim != 3 and not (project and P.dim > 3):
        raise ValueError(
            f"OFF export needs a 3-dimensional polytope, got dim {P.dim}"
            + ("" if P.dim < 3 else "; use the projection option")
        )
    X = np.array([[to_float(x) for x in v] for v in P.vertices])
    centre = X.mean(axis=0)
    Q, _ = np.linalg.qr((X - centre).T)
    hull = (X - centre) @ Q[:, :P.dim]
    if P.dim > 3:
        frame, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((P.dim, 3)))
        coords = hull @ frame
    elif P.ambient_dim == 3:
        coords = X
    else:
        coords = hull
    if P.dim == 3:
        faces = []
        for i, (a, _) in enumerate(P.inequalities):
            idx = P.facet_vertices(i)
            normal = np.array([to_float(x) for x in a])
            if P.ambient_dim != 3:
                normal = normal @ Q[:, :3]
            faces.append(_cycle(idx, coords, normal))
    else:
        faces = [_cycle(sorted(F), coords) for F in P.faces() if _face_dim(P, F) == 2]
    out = ["OFF", f"{len(P.vertices)} {len(faces)} 0"]
    out += [" ".join(f"{(c if abs(c) > 1e-12 else 0.0):.12g}" for c in row) for row in coords]
    out += [" ".join(str(x) for x in [len(F)] + list(F)) for F in faces]
    return "\n".join(out) + "\n"


def _face_dim(P: Polytope, F) -> int:
    from .exactfield import affine_hull

    return affine_hull([P.vertices[i] for i in sorted(F)])[0]


def export_off(P: Polytope, path: str, project: bool = False) -> None:
    text = off_text(P, project)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
