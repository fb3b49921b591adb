"""Tests for half-edge webs, rectangle generators, gluing and linear combinations."""

from unittest import TestCase

import pytest

from a2_spider.errors import A2Error, BoundaryMismatchError
from a2_spider.qalg import RationalScalar, qint
from a2_spider.web import (
    Box,
    WebSum,
    box_web,
    cable,
    cap_web,
    circle,
    closure,
    compose,
    compose_all,
    crossing_web,
    cup_web,
    faces,
    flip,
    h_web,
    identity,
    merge_web,
    mirror,
    partial_closure,
    restrict,
    split_web,
    stair_web,
    sum_closure,
    sum_compose,
    sum_mirror,
    sum_tensor,
    tensor,
    theta,
    validate_word,
)


class TestGenerators(TestCase):
    """Test boundary words and node counts of the elementary rectangles."""

    def test_identity_words(self) -> None:
        """Test identity keeps its word on both sides."""
        web = identity("-+-")
        self.assertEqual((web.bottom_word, web.top_word), ("-+-", "-+-"))
        self.assertFalse(web.is_closed)
        self.assertEqual(repr(identity("-")), "Web(bottom='-', top='-', loops=0)")

    def test_h_web(self) -> None:
        """Test H web keeps the word and adds a source and a sink."""
        web = h_web("+--", 1)
        self.assertEqual((web.bottom_word, web.top_word), ("+--", "+--"))
        self.assertEqual(web.trivalent_count(), 2)
        with self.assertRaises(A2Error):
            h_web("-+", 0)

    def test_merge_and_split_flip_sign(self) -> None:
        """Test forks turn two strands into one of the opposite sign and back."""
        merge = merge_web("--", 0)
        self.assertEqual((merge.bottom_word, merge.top_word), ("--", "+"))
        split = split_web("+-", 0)
        self.assertEqual((split.bottom_word, split.top_word), ("+-", "---"))
        with self.assertRaises(A2Error):
            merge_web("-+", 0)

    def test_cap_and_cup(self) -> None:
        """Test turnbacks remove or create an opposite-sign pair."""
        cap = cap_web("--+", 1)
        self.assertEqual((cap.bottom_word, cap.top_word), ("--+", "-"))
        cup = cup_web("-", 1, "+-")
        self.assertEqual((cup.bottom_word, cup.top_word), ("-", "-+-"))
        with self.assertRaises(A2Error):
            cap_web("--", 0)
        with self.assertRaises(A2Error):
            cup_web("-", 0, "--")
        with self.assertRaises(A2Error):
            cup_web("-", 3, "-+")

    def test_stair_and_crossing_exchange_signs(self) -> None:
        """Test the exchange gadgets swap opposite signs."""
        self.assertEqual(stair_web("-+", 0).top_word, "+-")
        self.assertEqual(crossing_web("-+", 0).top_word, "+-")
        self.assertEqual(crossing_web("--", 0).top_word, "--")
        with self.assertRaises(A2Error):
            stair_web("++", 0)
        with self.assertRaises(A2Error):
            crossing_web("-", 0)

    def test_crossing_signs(self) -> None:
        """Test parallel '\\' crossings are negative and antiparallel ones positive."""
        parallel = crossing_web("--", 0, "\\")
        antiparallel = crossing_web("-+", 0, "\\")
        self.assertEqual(parallel.crossing_sign(parallel.crossings[0]), -1)
        self.assertEqual(antiparallel.crossing_sign(antiparallel.crossings[0]), 1)
        flipped = crossing_web("--", 0, "/")
        self.assertEqual(flipped.crossing_sign(flipped.crossings[0]), 1)

    def test_box_web(self) -> None:
        """Test a box rectangle carries its label."""
        label = Box("clasp", "-+", "+-")
        web = box_web(label)
        self.assertEqual((web.bottom_word, web.top_word), ("-+", "+-"))
        self.assertEqual(web.labels[web.boxes[0]], label)

    def test_words_are_validated(self) -> None:
        """Test sign words reject other characters."""
        with self.assertRaises(A2Error):
            validate_word("-x")
        self.assertEqual(flip("-++"), "+--")


class TestGluing(TestCase):
    """Test composition, tensor products and closures."""

    def test_compose_matches_words(self) -> None:
        """Test stacking checks the shared word."""
        web = compose(merge_web("--", 0), split_web("+", 0))
        self.assertEqual((web.bottom_word, web.top_word), ("--", "--"))
        with self.assertRaises(BoundaryMismatchError):
            compose(identity("-"), identity("+"))

    def test_compose_with_identity_is_canonical(self) -> None:
        """Test gluing an identity does not change the canonical form."""
        web = h_web("--", 0)
        self.assertEqual(compose(identity("--"), web).key(), web.key())
        self.assertEqual(compose_all([web, identity("--"), identity("--")]).key(), web.key())

    def test_tensor_concatenates(self) -> None:
        """Test side by side placement."""
        web = tensor(identity("-"), merge_web("++", 0))
        self.assertEqual((web.bottom_word, web.top_word), ("-++", "--"))
        strand = identity("-")
        self.assertIs(tensor(strand, identity("")), strand)

    def test_circle_and_closure(self) -> None:
        """Test closures of identities are free loops."""
        self.assertEqual(circle().loops, 1)
        self.assertEqual(closure(identity("-+-")).loops, 3)
        with self.assertRaises(BoundaryMismatchError):
            closure(crossing_web("-+", 0))

    def test_partial_closure(self) -> None:
        """Test closing the leftmost strand of an identity leaves one strand and a loop."""
        web = partial_closure(identity("-+"), 1)
        self.assertEqual((web.bottom_word, web.top_word, web.loops), ("+", "+", 1))
        right = partial_closure(identity("-+"), 1, side="right")
        self.assertEqual((right.bottom_word, right.top_word), ("-", "-"))
        with self.assertRaises(BoundaryMismatchError):
            partial_closure(crossing_web("-+", 0), 1)

    def test_theta(self) -> None:
        """Test the theta web is closed with one source and one sink."""
        web = theta()
        self.assertTrue(web.is_closed)
        self.assertEqual(len(web.nodes("source")), 1)
        self.assertEqual(len(web.nodes("sink")), 1)
        self.assertEqual(len(faces(web)), 3)

    def test_mirror(self) -> None:
        """Test mirroring exchanges the words and is an involution."""
        web = merge_web("--", 0)
        reflected = mirror(web)
        self.assertEqual((reflected.bottom_word, reflected.top_word), ("+", "--"))
        self.assertEqual(len(reflected.nodes("source")), 1)
        self.assertEqual(mirror(reflected).key(), web.key())

    def test_cable(self) -> None:
        """Test cabling a crossing gives a grid of crossings."""
        web = cable(crossing_web("-+", 0), 2)
        self.assertEqual((web.bottom_word, web.top_word), ("--++", "++--"))
        self.assertEqual(len(web.crossings), 4)
        strand = identity("-")
        self.assertIs(cable(strand, 1), strand)

    def test_cable_rejects_vertices(self) -> None:
        """Test cabling needs a flat diagram."""
        with self.assertRaises(A2Error):
            cable(h_web("--", 0), 2)
        with self.assertRaises(A2Error):
            cable(identity("-"), 0)

    def test_cable_box_label(self) -> None:
        """Test box labels are cabled sign by sign."""
        self.assertEqual(Box("clasp", "-+", "-+").cabled(2), Box("clasp", "--++", "--++"))
        web = cable(box_web(Box("clasp", "-", "-")), 3)
        self.assertEqual(web.labels[web.boxes[0]].bottom, "---")

    def test_faces_of_a_strand(self) -> None:
        """Test a single strand has one boundary face."""
        (face,) = faces(identity("-"))
        self.assertTrue(face.boundary)
        self.assertEqual(face.size, 2)

    def test_restrict(self) -> None:
        """Test restricting to the only component of theta keeps both vertices."""
        web = theta()
        (component,) = web.components()
        self.assertEqual(restrict(web, component).trivalent_count(), 2)


class TestWebSum(TestCase):
    """Test linear combinations of webs."""

    def test_terms_merge_by_canonical_form(self) -> None:
        """Test equal webs add their coefficients and cancel."""
        web = h_web("--", 0)
        total = WebSum.of(web) + WebSum.of(compose(identity("--"), web), 2)
        self.assertEqual(len(total), 1)
        self.assertEqual(total.coefficient(web), 3)
        self.assertTrue((total - total).is_zero())

    def test_boundary_mismatch(self) -> None:
        """Test terms must share the boundary."""
        total = WebSum.of(identity("--"))
        with self.assertRaises(BoundaryMismatchError):
            total.add_term(qint(1), identity("-"))
        with self.assertRaises(BoundaryMismatchError):
            _ = total + WebSum.of(identity("++"))

    def test_rational_coefficients(self) -> None:
        """Test a shared denominator keeps coefficients exact."""
        total = WebSum.of(identity("--"), RationalScalar(qint(1), qint(2)))
        total = total + WebSum.of(h_web("--", 0), RationalScalar(qint(3), qint(2)))
        self.assertEqual(total.coefficient(h_web("--", 0)), RationalScalar(qint(3), qint(2)))
        self.assertEqual(total.scaled(qint(2)).coefficient(identity("--")), 1)
        self.assertEqual(WebSum.scalar(qint(3)).coefficient(closure(identity(""))), qint(3))

    def test_bilinear_operations(self) -> None:
        """Test composition, tensor, closure and mirror of sums."""
        total = WebSum.of(identity("-")) + WebSum.of(identity("-"))
        composed = sum_compose(total, total)
        self.assertEqual(composed.coefficient(identity("-")), 4)
        placed = sum_tensor(total, WebSum.of(identity("+")))
        self.assertEqual((placed.bottom, placed.top), ("-+", "-+"))
        closed = sum_closure(total)
        self.assertEqual(closed.coefficient(circle()), 2)
        reflected = sum_mirror(WebSum.of(merge_web("--", 0)))
        self.assertEqual((reflected.bottom, reflected.top), ("+", "--"))

    def test_map_terms(self) -> None:
        """Test a linear map applied term by term."""
        total = WebSum.of(identity("-"), 3)
        image = total.map_terms(lambda web: WebSum.of(web, qint(2)))
        self.assertEqual(image.coefficient(identity("-")), qint(2) * 3)


@pytest.mark.parametrize("word", ["-", "+", "-+", "+-+", "--++"])
def test_double_mirror_is_identity(word: str) -> None:
    """Test mirror is an involution on identities of every word."""
    assert mirror(mirror(identity(word))).key() == identity(word).key()
