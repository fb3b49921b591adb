"""Tests for PD codes and the web JSON schema."""

from typing import Any

import pytest

from a2_spider.errors import ParseError
from a2_spider.parsers import parse_pd, parse_webjson, pd_lines, web_to_json
from a2_spider.web import crossing_web, h_web, identity, merge_web, theta

TREFOIL = """
X[4,1,5,2] -
X[6,3,1,4] -
X[2,5,3,6] -
"""

FIGURE_EIGHT = "X[4,2,5,1] +\nX[8,6,1,5] +\nX[6,3,7,4] -\nX[2,7,3,8] -"


def _theta_document(sink_rotation: list[str]) -> dict[str, Any]:
    """Return a theta web document with the given sink rotation."""
    return {
        "nodes": [
            {"id": "s", "kind": "source", "rotation": ["s.a", "s.b", "s.c"]},
            {"id": "t", "kind": "sink", "rotation": sink_rotation},
        ],
        "edges": [
            {"id": "a", "from": "s.a", "to": "t.x"},
            {"id": "b", "from": "s.b", "to": "t.y"},
            {"id": "c", "from": "s.c", "to": "t.z"},
        ],
    }


def test_trefoil_crossings_are_negative() -> None:
    """Test the left trefoil has three negative crossings."""
    web = parse_pd(TREFOIL)
    assert web.is_closed
    assert [web.crossing_sign(node) for node in web.crossings] == [-1, -1, -1]


def test_figure_eight_signs() -> None:
    """Test the figure-eight knot has two crossings of each sign."""
    web = parse_pd(FIGURE_EIGHT)
    assert sorted(web.crossing_sign(node) for node in web.crossings) == [-1, -1, 1, 1]
    assert len(web.components()) == 1


def test_loops_and_comments() -> None:
    """Test O lines add free loops and comments are ignored."""
    web = parse_pd("O  # unknot\n\nO")
    assert web.loops == 2
    assert not web.kind


def test_unreadable_line() -> None:
    """Test a malformed line names its line number."""
    with pytest.raises(ParseError, match="Line 2"):
        parse_pd("X[1,2,3,4] +\nX[1,2,3] -")


def test_strand_used_once() -> None:
    """Test every label must appear exactly twice."""
    with pytest.raises(ParseError, match="appears 1 time"):
        parse_pd("X[1,2,3,4] +\nX[4,3,2,5] -")


def test_orientation_conflict() -> None:
    """Test a strand entering two crossings is rejected."""
    with pytest.raises(ParseError, match="Orientation conflict"):
        parse_pd("X[1,1,2,2] -")


@pytest.mark.parametrize("code", [TREFOIL, FIGURE_EIGHT])
def test_pd_lines_read_back(code: str) -> None:
    """Test written PD lines describe the same diagram."""
    web = parse_pd(code)
    again = parse_pd("\n".join(pd_lines(web)))
    assert again.key() == web.key()
    assert sorted(line[-1] for line in pd_lines(web)) == sorted(
        line.strip()[-1] for line in code.strip().splitlines()
    )


def test_pd_lines_need_crossing_diagram() -> None:
    """Test webs with vertices have no PD code."""
    with pytest.raises(ParseError):
        pd_lines(theta())


def test_planar_theta_document() -> None:
    """Test a theta whose vertices turn opposite ways is planar."""
    web = parse_webjson(_theta_document(["t.z", "t.y", "t.x"]))
    assert web.trivalent_count() == 2
    assert web.key() == theta().key()


def test_nonplanar_theta_document() -> None:
    """Test a theta on the torus is rejected."""
    with pytest.raises(ParseError, match="Invalid planar data"):
        parse_webjson(_theta_document(["t.x", "t.y", "t.z"]))


@pytest.mark.parametrize(
    "web",
    [identity("-+"), h_web("--", 0), merge_web("++", 0), crossing_web("-+", 0, "/"), theta()],
)
def test_webjson_reads_back(web: Any) -> None:
    """Test serialized webs parse back to the same canonical form."""
    again = parse_webjson(web_to_json(web))
    assert again.key() == web.key()
    assert (again.bottom_word, again.top_word) == (web.bottom_word, web.top_word)


def test_dangling_half_edge() -> None:
    """Test a rotation naming an unattached half-edge."""
    document = _theta_document(["t.z", "t.y", "t.w"])
    with pytest.raises(ParseError, match="dangling"):
        parse_webjson(document)


def test_unknown_kind_and_missing_over_pair() -> None:
    """Test node kinds and crossing data are checked."""
    document = _theta_document(["t.z", "t.y", "t.x"])
    document["nodes"][1]["kind"] = "vertex"
    with pytest.raises(ParseError, match="unknown kind"):
        parse_webjson(document)
    crossing = web_to_json(crossing_web("--", 0))
    crossing["crossings"] = []
    with pytest.raises(ParseError, match="over_pair"):
        parse_webjson(crossing)


def test_half_edge_used_twice() -> None:
    """Test two edges cannot share a half-edge."""
    document = _theta_document(["t.z", "t.y", "t.x"])
    document["edges"].append({"id": "d", "from": "s.a", "to": "t.y"})
    with pytest.raises(ParseError, match="more than one edge"):
        parse_webjson(document)


def test_boundary_sign_against_orientation() -> None:
    """Test a boundary point whose sign disagrees with its edge."""
    document = web_to_json(identity("-"))
    document["boundary"][0]["sign"] = "+"
    with pytest.raises(ParseError):
        parse_webjson(document)


def test_missing_field() -> None:
    """Test malformed documents raise parse errors rather than key errors."""
    with pytest.raises(ParseError, match="Malformed"):
        parse_webjson({"nodes": [{"kind": "source"}]})
