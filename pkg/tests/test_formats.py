from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

import pytest

from conftest import FIXTURES, fixture_text, module_points, qtaus
from icotomo import formats as fmt
from icotomo.geometry import FIVEFOLD_AXIS_STAR, Direction, ModulePoint, Point3, fivefold_directions
from icotomo.qtau import HALF, QTau
from icotomo.tomography import xray
from icotomo.window import window_icosahedron


def test_origin_points_file():
    assert fmt.parse_points("0 0 0 0 0 0\n") == [ModulePoint(0, 0, 0, 0, 0, 0)]


def test_comments_and_blank_lines():
    text = "# header comment\n\n1 2 3 4 5 6  # trailing\n"
    assert fmt.parse_points(text) == [ModulePoint(1, 2, 3, 4, 5, 6)]


def test_patch_file_round_trip(patch3):
    text = fmt.serialize_points(patch3.points)
    assert fmt.parse_points(text) == patch3.points
    assert fmt.serialize_points(fmt.parse_points(text)) == text


def test_zero_denominator_error():
    with pytest.raises(fmt.ParseError, match="zero denominator") as info:
        fmt.parse_points("0 0 0 0 0 0\n1/0+2t 0 0\n")
    assert info.value.line == 2 and info.value.column == 1


def test_error_positions():
    with pytest.raises(fmt.ParseError) as info:
        fmt.parse_points("0 0 x 0 0 0\n")
    assert (info.value.line, info.value.column) == (1, 5)
    with pytest.raises(fmt.ParseError, match="6 integers or 3"):
        fmt.parse_points("1 2\n")


@pytest.mark.parametrize(
    "parser,text",
    [
        (fmt.parse_points, "points 3\n"),
        (fmt.parse_slice, "slab height 0\n"),
        (fmt.parse_xray, "xray dir 0 1 0 0 0 0\n"),
        (fmt.parse_window, "window 4d\n"),
    ],
)
def test_unknown_headers(parser, text):
    with pytest.raises(fmt.ParseError):
        parser(text)


def test_slice_round_trip(central3):
    text = fmt.serialize_slice(central3)
    s = fmt.parse_slice(text)
    assert s.height == central3.height and s.points == central3.points
    assert fmt.serialize_slice(s) == text
    with pytest.raises(fmt.ParseError, match="slice height"):
        fmt.parse_slice("slice height 1\n0 0 0 0 0 0\n")


def test_xray_round_trip(central3):
    for u in fivefold_directions():
        x = xray(central3.physical(), u)
        text = fmt.serialize_xray(x)
        assert fmt.parse_xray(text) == x
        assert fmt.serialize_xray(fmt.parse_xray(text)) == text


def test_xray_rejects_bad_base():
    with pytest.raises(fmt.ParseError, match="orthogonal"):
        fmt.parse_xray("xray direction 0 -1 -2 2 1 -1\nbase 0 1 0 count 1\n")
    with pytest.raises(fmt.ParseError, match="positive"):
        fmt.parse_xray("xray direction 0 -1 -2 2 1 -1\nbase 1 0 0 count 0\n")


def test_window_round_trip():
    w = window_icosahedron()
    text = fmt.serialize_window(w)
    assert fmt.serialize_window(fmt.parse_window(text)) == text
    sec = w.cross_section(FIVEFOLD_AXIS_STAR, QTau(0))
    text2 = fmt.serialize_window(sec)
    assert text2.startswith("window 2d")
    back = fmt.parse_window(text2)
    assert back.plane == sec.plane and back.vertices == sec.vertices
    assert fmt.serialize_window(back) == text2


def test_directions_round_trip():
    d = fivefold_directions()
    text = fmt.serialize_directions(d)
    assert fmt.parse_directions(text) == d
    with pytest.raises(fmt.ParseError, match="zero direction"):
        fmt.parse_directions("0 0 0 0 0 0\n")


@pytest.mark.parametrize("name", sorted(p.name for p in FIXTURES.iterdir() if p.is_file()))
def test_fixture_files_round_trip(name):
    text = fixture_text(name)
    if name.endswith(".win"):
        again = fmt.serialize_window(fmt.parse_window(text))
    elif name.startswith("dirs"):
        again = fmt.serialize_directions(fmt.parse_directions(text))
    elif text.startswith("slice"):
        again = fmt.serialize_slice(fmt.parse_slice(text))
    else:
        again = fmt.serialize_points(fmt.parse_points(text))
    assert again == text


@given(st.lists(st.one_of(module_points, st.builds(Point3, qtaus, qtaus, qtaus)), max_size=8))
def test_mixed_points_round_trip(pts):
    text = fmt.serialize_points(pts)
    assert fmt.serialize_points(fmt.parse_points(text)) == text


def test_non_module_point_written_as_literals():
    p = Point3(HALF, 0, 0)
    assert fmt.serialize_points([p]) == "1/2 0/1 0/1\n"
    assert fmt.parse_points("1/2 0/1 0/1\n") == [p]


def test_parse_qtau3():
    assert fmt.parse_qtau3(["1", "t", "1/2"]) == fmt.parse_qtau3(["1,t,1/2"])
    with pytest.raises(ValueError):
        fmt.parse_qtau3(["1,2"])


def test_direction_file_fixture_is_fivefold(dirs3, dirs4):
    assert all(isinstance(d, Direction) and d.is_fivefold_orthogonal for d in dirs3 + dirs4)
