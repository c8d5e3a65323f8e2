"""Text file formats: points, slices, X-rays, windows and direction sets.

All numbers are exact: integers for module coefficients and QTau literals
(``p/q`` or ``p/q+r/st``) for coordinates.  Blank lines and ``#`` comments
are ignored when parsing.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

from .geometry import Direction, LineKey, ModulePoint, Point3, embed, membership
from .modelset import Slice
from .qtau import LiteralError, QTau, format_qtau, parse_qtau
from .tomography import XRayData
from .window import Window, WindowError

PointLike = Union[ModulePoint, Point3]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<text>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column


def _lines(text: str) -> Iterator[tuple[int, list[tuple[int, str]]]]:
    """Yield (line number, [(column, token), ...]) for content lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        tokens = []
        col = 0
        for tok in content.split():
            col = content.index(tok, col)
            tokens.append((col + 1, tok))
            col += len(tok)
        yield lineno, tokens


def _int(tok: tuple[int, str], lineno: int, source: str) -> int:
    col, s = tok
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected an integer, got {s!r}", lineno, col, source) from None


def _qtau(tok: tuple[int, str], lineno: int, source: str) -> QTau:
    col, s = tok
    try:
        return parse_qtau(s)
    except LiteralError as exc:
        raise ParseError(str(exc), lineno, col, source) from None


def _point_from_tokens(toks, lineno: int, source: str) -> PointLike:
    if len(toks) == 6:
        return ModulePoint(*(_int(t, lineno, source) for t in toks))
    if len(toks) == 3:
        return Point3(*(_qtau(t, lineno, source) for t in toks))
    raise ParseError(f"expected 6 integers or 3 QTau literals, got {len(toks)} fields", lineno, toks[0][0], source)


def format_point(p: PointLike) -> str:
    if isinstance(p, ModulePoint):
        return " ".join(str(c) for c in p.coeffs)
    mp = membership(p)
    if mp is not None:
        return format_point(mp)
    return " ".join(format_qtau(c) for c in p)


def format_point3(p: Point3) -> str:
    return " ".join(format_qtau(c) for c in p)


# -- points ------------------------------------------------------------------------


def parse_points(text: str, source: str = "<text>") -> list[PointLike]:
    out: list[PointLike] = []
    for lineno, toks in _lines(text):
        if toks[0][1].isalpha():
            raise ParseError(f"unknown header {toks[0][1]!r}", lineno, toks[0][0], source)
        out.append(_point_from_tokens(toks, lineno, source))
    return out


def serialize_points(points: Iterable[PointLike]) -> str:
    return "".join(format_point(p) + "\n" for p in points)


# -- slices ------------------------------------------------------------------------


def parse_slice(text: str, source: str = "<text>") -> Slice:
    height = None
    pts: list[ModulePoint] = []
    for lineno, toks in _lines(text):
        if height is None:
            if len(toks) != 3 or toks[0][1] != "slice" or toks[1][1] != "height":
                raise ParseError("expected header 'slice height <QTau>'", lineno, toks[0][0], source)
            height = _qtau(toks[2], lineno, source)
            continue
        p = _point_from_tokens(toks, lineno, source)
        if not isinstance(p, ModulePoint):
            raise ParseError("slice points must be module coefficients", lineno, toks[0][0], source)
        pts.append(p)
    if height is None:
        raise ParseError("empty slice file", 1, 1, source)
    s = Slice(height, pts)
    for p in pts:
        if embed(p).dot(s.normal) != height:
            raise ParseError(f"point {p!r} is not at the slice height", 1, 1, source)
    return s


def serialize_slice(s: Slice) -> str:
    return f"slice height {format_qtau(s.height)}\n" + serialize_points(s.points)


# -- X-rays --------------------------------------------------------------------------


def parse_xray(text: str, source: str = "<text>") -> XRayData:
    direction = None
    counts: dict[LineKey, int] = {}
    for lineno, toks in _lines(text):
        words = [t[1] for t in toks]
        if direction is None:
            if len(toks) != 8 or words[:2] != ["xray", "direction"]:
                raise ParseError("expected header 'xray direction <6 ints>'", lineno, toks[0][0], source)
            mp = ModulePoint(*(_int(t, lineno, source) for t in toks[2:]))
            if embed(mp).is_zero:
                raise ParseError("zero direction", lineno, toks[2][0], source)
            direction = Direction.from_module(mp)
            continue
        if len(toks) != 6 or words[0] != "base" or words[4] != "count":
            raise ParseError("expected 'base <x> <y> <z> count <int>'", lineno, toks[0][0], source)
        base = Point3(*(_qtau(t, lineno, source) for t in toks[1:4]))
        if not base.dot(direction.canonical_key).is_zero:
            raise ParseError("line base is not orthogonal to the direction", lineno, toks[1][0], source)
        c = _int(toks[5], lineno, source)
        if c < 1:
            raise ParseError("counts must be positive", lineno, toks[5][0], source)
        key = LineKey(direction, base)
        if key in counts:
            raise ParseError("duplicate line", lineno, toks[0][0], source)
        counts[key] = c
    if direction is None:
        raise ParseError("empty X-ray file", 1, 1, source)
    return XRayData(direction, counts)


def serialize_xray(data: XRayData) -> str:
    head = "xray direction " + " ".join(str(c) for c in data.direction.witness.coeffs) + "\n"
    body = "".join(f"base {format_point3(ln.base)} count {data.counts[ln]}\n" for ln in data.support)
    return head + body


# -- windows ---------------------------------------------------------------------------


def parse_window(text: str, source: str = "<text>") -> Window:
    plane = None
    verts: list[Point3] = []
    header = None
    for lineno, toks in _lines(text):
        if header is None:
            words = [t[1] for t in toks]
            if words[:2] == ["window", "3d"] and len(toks) == 2:
                header = "3d"
            elif words[:2] == ["window", "2d"] and len(toks) == 6:
                header = "2d"
                normal = Point3(*(_qtau(t, lineno, source) for t in toks[2:5]))
                plane = (normal, _qtau(toks[5], lineno, source))
            else:
                raise ParseError("expected 'window 3d' or 'window 2d <normal> <offset>'", lineno, toks[0][0], source)
            continue
        if len(toks) != 3:
            raise ParseError("expected three QTau literals per vertex", lineno, toks[0][0], source)
        verts.append(Point3(*(_qtau(t, lineno, source) for t in toks)))
    if header is None:
        raise ParseError("empty window file", 1, 1, source)
    try:
        return Window(verts, plane=plane)
    except WindowError as exc:
        raise ParseError(str(exc), 1, 1, source) from None


def serialize_window(w: Window) -> str:
    if w.plane is None:
        head = "window 3d\n"
    else:
        n, c = w.plane
        head = f"window 2d {format_point3(n)} {format_qtau(c)}\n"
    return head + "".join(format_point3(v) + "\n" for v in w.vertices)


# -- directions ------------------------------------------------------------------------


def parse_directions(text: str, source: str = "<text>") -> list[Direction]:
    out = []
    for lineno, toks in _lines(text):
        if len(toks) != 6:
            raise ParseError("expected six integers (module coefficients)", lineno, toks[0][0], source)
        mp = ModulePoint(*(_int(t, lineno, source) for t in toks))
        if embed(mp).is_zero:
            raise ParseError("zero direction", lineno, toks[0][0], source)
        out.append(Direction.from_module(mp))
    return out


def serialize_directions(dirs: Sequence[Direction]) -> str:
    return "".join(" ".join(str(c) for c in d.witness.coeffs) + "\n" for d in dirs)


# -- helpers -----------------------------------------------------------------------------


def parse_qtau3(values: Sequence[str]) -> Point3:
    """Three QTau literals, given separately or as one comma-separated string."""
    if len(values) == 1:
        values = values[0].split(",")
    if len(values) != 3:
        raise ValueError("expected three QTau literals")
    return Point3(*(parse_qtau(v) for v in values))


def read(path: Union[str, Path]) -> str:
    return Path(path).read_text(encoding="utf-8")


def write(path: Union[str, Path], text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def module_point_of(p: Point3) -> ModulePoint:
    mp = membership(p)
    if mp is None:
        raise ValueError(f"{p!r} is not in L")
    return mp


__all__ = [
    "ParseError", "parse_points", "serialize_points", "parse_slice", "serialize_slice",
    "parse_xray", "serialize_xray", "parse_window", "serialize_window", "parse_directions",
    "serialize_directions", "parse_qtau3", "format_point", "read", "write",
]
