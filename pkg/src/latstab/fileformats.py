"""Text formats for point sets ("pts") and cover families ("cover").

pts::

    # optional comments
    d 2
    1 1
    1 2

cover::

    d 3
    1 2 w=1/2
    2 3

Writers emit a canonical form (header, then lexicographically sorted points
or sets in file order), so ``read(write(x)) == x`` and writing twice gives
the same bytes.
"""

from __future__ import annotations

import hashlib
import logging
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Union

from latstab.cover import CoverFamily
from latstab.lattice_core import PointSet

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ParseError(ValueError):
    """Malformed input, with a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1, source: str = "<string>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.source = source


def _tokens(line: str) -> Iterator[tuple[int, str]]:
    """(1-based column, token) for whitespace-separated tokens."""
    col = 0
    n = len(line)
    while col < n:
        while col < n and line[col].isspace():
            col += 1
        start = col
        while col < n and not line[col].isspace():
            col += 1
        if col > start:
            yield start + 1, line[start:col]


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, raw


def _parse_int(tok: str, line: int, col: int, source: str) -> int:
    # int() also accepts "1_000" and "+3"; the format is plain decimal only
    body = tok[1:] if tok[:1] == "-" else tok
    if not body.isdigit() or not body.isascii():
        raise ParseError(f"expected a decimal integer, got {tok!r}", line, col, source)
    return int(tok)


def _parse_header(lines, source: str) -> tuple[int, int]:
    for lineno, raw in lines:
        toks = list(_tokens(raw))
        if len(toks) != 2 or toks[0][1] != "d":
            raise ParseError("first line must be 'd <dim>'", lineno, toks[0][0], source)
        dim = _parse_int(toks[1][1], lineno, toks[1][0], source)
        if dim < 1:
            raise ParseError(f"dimension must be positive, got {dim}", lineno, toks[1][0], source)
        return dim, lineno
    raise ParseError("missing 'd <dim>' header", 1, 1, source)


def parse_pts(text: str, source: str = "<string>") -> PointSet:
    lines = _content_lines(text)
    dim, _ = _parse_header(lines, source)
    points = []
    seen = set()
    dupes = 0
    for lineno, raw in lines:
        toks = list(_tokens(raw))
        if len(toks) != dim:
            col = toks[dim][0] if len(toks) > dim else len(raw.rstrip()) + 1
            raise ParseError(f"expected {dim} coordinates, got {len(toks)}", lineno, col, source)
        p = tuple(_parse_int(t, lineno, c, source) for c, t in toks)
        if p in seen:
            dupes += 1
            continue
        seen.add(p)
        points.append(p)
    if dupes:
        log.warning("%s: dropped %d duplicate point(s)", source, dupes)
    return PointSet(dim, points)


def format_pts(S: PointSet) -> str:
    out = [f"d {S.dim}"]
    out.extend(" ".join(str(c) for c in p) for p in S.sorted_points)
    return "\n".join(out) + "\n"


def parse_cover(text: str, source: str = "<string>") -> CoverFamily:
    lines = _content_lines(text)
    dim, _ = _parse_header(lines, source)
    sets, weights = [], []
    any_weight = False
    for lineno, raw in lines:
        idx = []
        w = None
        for col, tok in _tokens(raw):
            if tok.startswith("w="):
                if w is not None:
                    raise ParseError("weight given twice", lineno, col, source)
                try:
                    w = Fraction(tok[2:])
                except (ValueError, ZeroDivisionError):
                    raise ParseError(f"bad rational weight {tok[2:]!r}", lineno, col + 2, source) from None
                if w < 0:
                    raise ParseError("weights must be nonnegative", lineno, col + 2, source)
                continue
            if w is not None:
                raise ParseError("the weight must come last on its line", lineno, col, source)
            i = _parse_int(tok, lineno, col, source)
            if not 1 <= i <= dim:
                raise ParseError(f"index {i} outside 1..{dim}", lineno, col, source)
            if i in idx:
                raise ParseError(f"index {i} repeated within one set", lineno, col, source)
            idx.append(i)
        if not idx:
            raise ParseError("a cover set needs at least one index", lineno, 1, source)
        any_weight = any_weight or w is not None
        sets.append(idx)
        weights.append(w)
    if not sets:
        raise ParseError("cover family has no sets", 1, 1, source)
    if any_weight:
        weights = [Fraction(1) if w is None else w for w in weights]
        return CoverFamily(dim, sets, weights)
    return CoverFamily(dim, sets)


def format_cover(G: CoverFamily) -> str:
    out = [f"d {G.dim}"]
    for k, g in enumerate(G.sets):
        line = " ".join(str(i) for i in sorted(g))
        if G.weights is not None:
            line += f" w={G.weights[k]}"
        out.append(line)
    return "\n".join(out) + "\n"


def read_pts(path: PathLike) -> PointSet:
    return parse_pts(Path(path).read_text(encoding="utf-8"), source=str(path))


def write_pts(S: PointSet, path: PathLike) -> None:
    Path(path).write_bytes(format_pts(S).encode("utf-8"))


def read_cover(path: PathLike) -> CoverFamily:
    return parse_cover(Path(path).read_text(encoding="utf-8"), source=str(path))


def write_cover(G: CoverFamily, path: PathLike) -> None:
    Path(path).write_bytes(format_cover(G).encode("utf-8"))


def instance_hash(S: PointSet) -> str:
    """sha256 of the canonical pts text; identifies an instance for replay."""
    return hashlib.sha256(format_pts(S).encode("utf-8")).hexdigest()
