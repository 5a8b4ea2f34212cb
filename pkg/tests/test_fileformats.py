import json
import logging
import math
from fractions import Fraction

import pytest

from latstab import INFINITE, CoverFamily, LatticeBox, PointSet, annulus, loomis_whitney_cover
from latstab import approximate_box, approximate_cube
from latstab.fileformats import (
    ParseError,
    format_cover,
    format_pts,
    instance_hash,
    parse_cover,
    parse_pts,
    read_pts,
    write_cover,
    write_pts,
)
from latstab.report_json import dumps, to_jsonable


def test_pts_parse_with_comments():
    text = "# header comment\nd 2\n0 0\n\n# mid\n-3 12\n"
    S = parse_pts(text)
    assert S == PointSet(2, [(0, 0), (-3, 12)])


def test_pts_duplicates_warn(caplog):
    with caplog.at_level(logging.WARNING):
        S = parse_pts("d 2\n1 1\n1 1\n2 2\n")
    assert len(S) == 2
    assert "duplicate" in caplog.text


def test_pts_round_trip(tmp_path):
    S = annulus(5, 2, 3)
    path = tmp_path / "a.pts"
    write_pts(S, path)
    assert read_pts(path) == S
    first = path.read_bytes()
    write_pts(read_pts(path), path)
    assert path.read_bytes() == first
    assert format_pts(parse_pts(format_pts(S))) == format_pts(S)


def test_pts_empty_set_round_trip():
    S = PointSet(3)
    assert format_pts(S) == "d 3\n"
    assert parse_pts(format_pts(S)) == S


@pytest.mark.parametrize("text,line,col", [
    ("", 1, 1),
    ("2\n", 1, 1),
    ("d x\n", 1, 3),
    ("d 2\n1 2 3\n", 2, 5),
    ("d 2\n1\n", 2, 2),
    ("d 2\n1 +2\n", 2, 3),
    ("d 2\n0 0\n1 1.5\n", 3, 3),
])
def test_pts_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_pts(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_cover_parse_and_round_trip():
    G = parse_cover("d 3\n1 2 w=1/2\n2 3 w=1/2\n3 1 w=1/2\n")
    assert G.weights == (Fraction(1, 2),) * 3
    assert G.sets[2] == frozenset({1, 3})
    assert parse_cover(format_cover(G)) == G
    H = loomis_whitney_cover(4)
    assert parse_cover(format_cover(H)) == H and not parse_cover(format_cover(H)).is_weighted


def test_cover_partial_weights_default_to_one():
    G = parse_cover("d 2\n1 w=3/2\n2\n")
    assert G.weights == (Fraction(3, 2), Fraction(1))


def test_cover_file_round_trip(tmp_path):
    G = CoverFamily(3, [[1], [1, 2, 3], [1]], [1, Fraction(2, 7), 0])
    write_cover(G, tmp_path / "g.cover")
    assert parse_cover((tmp_path / "g.cover").read_text()) == G


@pytest.mark.parametrize("text,line,col", [
    ("d 2\n3\n", 2, 1),
    ("d 2\n1 1\n", 2, 3),
    ("d 2\nw=1\n", 2, 1),
    ("d 2\n1 w=1 2\n", 2, 7),
    ("d 2\n1 w=x\n", 2, 5),
    ("d 2\n1 w=-1\n", 2, 5),
    ("d 2\n", 1, 1),
])
def test_cover_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_cover(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_instance_hash_is_order_free():
    a = PointSet(2, [(0, 1), (1, 0)])
    b = PointSet(2, [(1, 0), (0, 1)])
    assert instance_hash(a) == instance_hash(b) != instance_hash(PointSet(2, [(0, 1)]))


def test_json_encoding_rules():
    out = to_jsonable({"q": Fraction(9, 91), "x": 1 / 3, "inf": INFINITE, "finf": math.inf,
                       "nan": math.nan, "box": LatticeBox([[2, 1]]), "s": frozenset({3, 1})})
    assert out["q"] == "9/91"
    assert out["x"] == 0.333333333333333
    assert out["inf"] == {"infinite": True} and out["finf"] == {"infinite": True}
    assert out["nan"] is None
    assert out["box"] == {"edges": [[1, 2]]} and out["s"] == [1, 3]


def test_reports_serialize():
    rep = approximate_box(annulus(10, 3, 2), loomis_whitney_cover(2))
    data = json.loads(dumps(rep))
    assert data["sym_diff_ratio"] == "9/91" and data["vacuous"] is True
    assert data["epsilon"] == 0.09
    data = json.loads(dumps(approximate_cube(LatticeBox([range(4)] * 3).to_pointset())))
    assert data["sym_diff_ratio"] == "0/1" and data["claims_ok"] is True
