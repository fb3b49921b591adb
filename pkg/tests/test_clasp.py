"""Tests for clasps, ladder webs and clasp shortcuts."""

import random
from collections.abc import Iterable
from fractions import Fraction
from unittest import TestCase

import pytest

from a2_spider.clasp import (
    ClaspSpec,
    GeneratorI,
    clasp_absorb,
    clasp_box,
    clasp_boxes,
    clasp_general,
    clasp_one_row,
    clasp_two_row,
    evaluate_clasped,
    exchange,
    expand_boxes,
    nested_caps,
    nested_turnback,
    one_row_terms,
    one_row_words,
    single_clasp_expansion,
    stair_step,
    triangle,
    two_row_terms,
    unclasp_boxes,
)
from a2_spider.errors import A2Error
from a2_spider.qalg import RationalScalar, qint
from a2_spider.skein import evaluate, reduce
from a2_spider.web import (
    Web,
    WebSum,
    cap_web,
    closure,
    compose,
    compose_all,
    h_web,
    identity,
    merge_web,
    sum_closure,
    sum_compose,
    sum_compose_all,
    tensor,
)
from conftest import quantum


def _dimension(a: int, b: int) -> RationalScalar:
    """Return the quantum dimension [a+1][b+1][a+b+2] / [2]."""
    return RationalScalar(quantum(a + 1, b + 1, a + b + 2), qint(2))


class TestClaspSpec(TestCase):
    """Test clasp boundaries and their shapes."""

    def test_kinds(self) -> None:
        """Test one-row, two-row and general words."""
        self.assertEqual(ClaspSpec("---").kind, "one-row")
        self.assertEqual(ClaspSpec("++").kind, "one-row")
        self.assertEqual(ClaspSpec("--+").kind, "two-row")
        self.assertEqual(ClaspSpec("-+-").kind, "general")
        self.assertEqual(ClaspSpec("-+", "+-").kind, "general")

    def test_sign_counts_must_match(self) -> None:
        """Test bottom and top need the same signs."""
        with self.assertRaises(A2Error):
            ClaspSpec("--", "-+")
        with self.assertRaises(A2Error):
            ClaspSpec("-x")

    def test_label(self) -> None:
        """Test the box label carries both words."""
        spec = ClaspSpec("-+", "+-")
        self.assertEqual((spec.minus, spec.plus), (1, 1))
        self.assertEqual((spec.label().bottom, spec.label().top), ("-+", "+-"))

    def test_generator_bounds(self) -> None:
        """Test I_j exists for 1 <= j <= m - 1."""
        self.assertEqual(GeneratorI(1, 2).web().key(), h_web("--", 0).key())
        with self.assertRaises(A2Error):
            GeneratorI(2, 2)
        with self.assertRaises(A2Error):
            GeneratorI(0, 3)


class TestOneRowClasp(TestCase):
    """Test the recursive one-row clasp."""

    def test_small_clasps(self) -> None:
        """Test the clasp on zero, one and two strands."""
        self.assertEqual(clasp_one_row(0).coefficient(closure(identity(""))), 1)
        self.assertEqual(clasp_one_row(1).coefficient(identity("-")), 1)
        two = clasp_one_row(2)
        self.assertEqual(two.coefficient(identity("--")), 1)
        self.assertEqual(two.coefficient(h_web("--", 0)), RationalScalar(-1, qint(2)))
        with self.assertRaises(A2Error):
            clasp_one_row(-1)

    def test_traces_are_quantum_dimensions(self) -> None:
        """Test the closure of the clasp on m strands."""
        for m in (1, 2, 3):
            self.assertEqual(evaluate(sum_closure(clasp_one_row(m))), _dimension(m, 0))
        self.assertEqual(evaluate(sum_closure(clasp_one_row(2, "+"))), _dimension(2, 0))

    def test_idempotent(self) -> None:
        """Test stacking the clasp on itself changes nothing."""
        clasp = clasp_one_row(2)
        self.assertTrue((reduce(sum_compose(clasp, clasp)) - clasp).is_zero())

    def test_killed_by_a_vertex(self) -> None:
        """Test a vertex on two clasp strands gives zero."""
        clasp = clasp_one_row(2)
        self.assertTrue(reduce(sum_compose(clasp, WebSum.of(merge_web("--", 0)))).is_zero())

    def test_single_clasp_expansion(self) -> None:
        """Test the expansion through one smaller clasp agrees on two strands."""
        expansion = reduce(single_clasp_expansion(2))
        self.assertTrue((expansion - clasp_one_row(2)).is_zero())
        with self.assertRaises(A2Error):
            single_clasp_expansion(0)


class TestTwoRowClasp(TestCase):
    """Test clasps on words with both signs."""

    def test_adjoint_trace(self) -> None:
        """Test the trace of the clasp on one strand of each sign."""
        self.assertEqual(evaluate(sum_closure(clasp_two_row(1, 1))), _dimension(1, 1))

    def test_killed_by_a_cap(self) -> None:
        """Test a cap on the middle pair gives zero."""
        clasp = clasp_two_row(1, 1)
        self.assertTrue(reduce(sum_compose(clasp, WebSum.of(cap_web("-+", 0)))).is_zero())

    def test_degenerate_rows(self) -> None:
        """Test an empty row leaves a one-row clasp."""
        self.assertTrue((clasp_two_row(2, 0) - clasp_one_row(2)).is_zero())
        self.assertTrue((clasp_two_row(0, 2) - clasp_one_row(2, "+")).is_zero())
        with self.assertRaises(A2Error):
            clasp_two_row(-1, 1)

    @pytest.mark.slow
    def test_larger_trace(self) -> None:
        """Test the trace of the clasp on two upward strands and one downward strand."""
        self.assertEqual(evaluate(sum_closure(clasp_two_row(2, 1))), _dimension(2, 1))

    def test_general_clasp_boundary(self) -> None:
        """Test a clasp between rearranged words keeps its boundary."""
        clasp = clasp_general(ClaspSpec("-+", "+-"))
        self.assertEqual((clasp.bottom, clasp.top), ("-+", "+-"))
        self.assertFalse(clasp.is_zero())
        self.assertTrue((clasp_general(ClaspSpec("--+")) - clasp_two_row(2, 1)).is_zero())


class TestLadderWebs(TestCase):
    """Test exchanges, stair steps, triangles and turnbacks."""

    def test_exchange(self) -> None:
        """Test adjacent exchanges rearrange a word."""
        web = exchange("-+-", "--+")
        self.assertEqual((web.bottom_word, web.top_word), ("-+-", "--+"))
        with self.assertRaises(A2Error):
            exchange("--", "-+")

    def test_stair_step(self) -> None:
        """Test the ladder moves one bundle past the other."""
        web = stair_step(2, 1)
        self.assertEqual((web.bottom_word, web.top_word), ("++-", "-++"))
        self.assertEqual(web.trivalent_count(), 4)
        with self.assertRaises(A2Error):
            stair_step(0, 1)

    def test_triangle(self) -> None:
        """Test the triangle joins two bundles into one of the other sign."""
        self.assertEqual(triangle(1).key(), merge_web("--", 0).key())
        web = triangle(2)
        self.assertEqual((web.bottom_word, web.top_word), ("----", "++"))
        with self.assertRaises(A2Error):
            triangle(0)

    def test_nested_turnbacks(self) -> None:
        """Test nested caps close the middle of the word."""
        self.assertEqual(nested_caps(2, 2, 2).top_word, "")
        web = nested_turnback(2, 2, 1)
        self.assertEqual((web.bottom_word, web.top_word), ("--++", "--++"))


class TestClaspBoxes(TestCase):
    """Test unexpanded clasps and their shortcuts."""

    def test_closed_box_evaluates(self) -> None:
        """Test a closed clasp box evaluates to its quantum dimension."""
        total = WebSum.of(closure(clasp_box("--")))
        self.assertEqual(evaluate_clasped(total), _dimension(2, 0))

    def test_expand_boxes(self) -> None:
        """Test expansion removes every box."""
        expanded = expand_boxes(WebSum.of(clasp_box("--")))
        self.assertTrue(all(not clasp_boxes(web) for _, web in expanded.terms()))
        self.assertTrue((expanded - clasp_one_row(2)).is_zero())

    def test_stacked_boxes_merge(self) -> None:
        """Test two stacked clasps become one."""
        stacked = WebSum.of(compose(clasp_box("--"), clasp_box("--")))
        (term,) = clasp_absorb(stacked).terms()
        self.assertEqual(len(clasp_boxes(term[1])), 1)

    def test_vertex_on_box_annihilates(self) -> None:
        """Test a vertex on adjacent box ports kills the term."""
        total = WebSum.of(compose(clasp_box("--"), merge_web("--", 0)))
        self.assertTrue(clasp_absorb(total).is_zero())
        self.assertFalse(clasp_absorb(total, rules=["stack"]).is_zero())

    def test_unknown_rule(self) -> None:
        """Test rule names are checked."""
        with self.assertRaises(A2Error):
            clasp_absorb(WebSum.of(clasp_box("--")), rules=["shrink"])


def _words(max_strands: int) -> list[tuple[int, int]]:
    """Return the row sizes (m, n) with 1 <= m + n <= max_strands."""
    return [(m, n) for m in range(max_strands + 1) for n in range(max_strands + 1 - m) if m + n]


def _killers(word: str) -> list[WebSum]:
    """Return every single cap or vertex on adjacent top points of a word."""
    webs = []
    for j in range(len(word) - 1):
        web = merge_web(word, j) if word[j] == word[j + 1] else cap_web(word, j)
        webs.append(WebSum.of(web))
    return webs


def _check_clasp_laws(sizes: Iterable[tuple[int, int]]) -> None:
    """Assert annihilation and idempotence of the two-row clasps of the given row sizes."""
    for m, n in sizes:
        clasp = clasp_two_row(m, n)
        for killer in _killers("-" * m + "+" * n):
            assert reduce(sum_compose(clasp, killer)).is_zero(), (m, n)
        assert (reduce(sum_compose_all([clasp, clasp])) - clasp).is_zero(), (m, n)


def test_clasp_laws_on_three_strands() -> None:
    """Test caps and vertices kill clasps, and clasps are idempotent."""
    _check_clasp_laws(_words(3))


def test_clasp_laws_on_two_plus_two_strands() -> None:
    """Test the clasp laws on the four-strand word --++."""
    _check_clasp_laws([(2, 2)])


@pytest.mark.slow
def test_clasp_laws_on_four_strands() -> None:
    """Test the clasp laws on every word with four strands."""
    _check_clasp_laws(_words(4))


def _degree_excess(terms: Iterable[tuple[RationalScalar, Web]]) -> set[Fraction]:
    """Return mdeg(coefficient) - v/4 over coefficient and web pairs."""
    return {
        coefficient.mdeg() - Fraction(web.trivalent_count(), 4) for coefficient, web in terms
    }


def _total(terms: Iterable[tuple[RationalScalar, Web]]) -> WebSum:
    """Return the reduced sum of coefficient and web pairs."""
    pairs = list(terms)
    total = WebSum.of(pairs[0][1], pairs[0][0])
    for coefficient, web in pairs[1:]:
        total = total + WebSum.of(web, coefficient)
    return reduce(total)


def test_one_row_words() -> None:
    """Test the I_j words count 1, 2, 6, 42 and each holds I_(m-1) at most once."""
    assert [len(one_row_words(m)) for m in range(1, 5)] == [1, 2, 6, 42]
    assert one_row_words(2) == {(): RationalScalar(1), (1,): RationalScalar(-1, qint(2))}
    assert all(word.count(3) <= 1 for word in one_row_words(4))
    with pytest.raises(A2Error):
        one_row_words(-1)


def test_one_row_degree_law() -> None:
    """Test every I_j word of a one-row clasp has coefficient degree v/4."""
    for m in range(1, 5):
        assert _degree_excess(one_row_terms(m)) == {0}, m
        assert _degree_excess(one_row_terms(m, "+")) == {0}, m


def test_one_row_words_sum_to_the_clasp() -> None:
    """Test the reduced words give the clasp, whose squares push the excess up from 0."""
    for m in range(1, 4):
        clasp = clasp_one_row(m)
        assert (_total(one_row_terms(m)) - clasp).is_zero(), m
        reduced = _degree_excess(clasp.items())
        assert min(reduced) == 0, m
        assert all(excess >= 0 for excess in reduced), m


@pytest.mark.slow
def test_one_row_degree_law_on_five_strands() -> None:
    """Test the one-row degree law on the 1806 words of five strands."""
    assert _degree_excess(one_row_terms(5)) == {0}


def _check_two_row_degree_law(m: int, n: int) -> None:
    """Assert two-row coefficients exceed v/4 by t(t+1)/2 for every t."""
    for t in range(min(m, n) + 1):
        assert _degree_excess(two_row_terms(m, n, t)) == {Fraction(t * (t + 1), 2)}, (m, n, t)


def test_two_row_degree_law() -> None:
    """Test two-row coefficients exceed v/4 by the triangular number of their turnbacks."""
    for m, n in ((1, 1), (2, 1), (1, 2), (2, 2)):
        _check_two_row_degree_law(m, n)
    with pytest.raises(A2Error):
        two_row_terms(1, 1, 2)


def test_two_row_terms_sum_to_the_clasp() -> None:
    """Test the unreduced terms of every t reduce to the two-row clasp."""
    for m, n in ((1, 1), (2, 1)):
        terms = [term for t in range(min(m, n) + 1) for term in two_row_terms(m, n, t)]
        assert (_total(terms) - clasp_two_row(m, n)).is_zero(), (m, n)


@pytest.mark.slow
def test_two_row_degree_law_up_to_three_strands_per_row() -> None:
    """Test the two-row degree law for all rows of at most three strands."""
    for m in range(1, 4):
        for n in range(1, 4):
            _check_two_row_degree_law(m, n)


def _clasped_configuration(rng: random.Random, max_strands: int) -> tuple[str, Web]:
    """Return a random sign word and the closure of clasp boxes stacked on it."""
    word = "".join(rng.choice("-+") for _ in range(rng.randint(2, max_strands)))
    layers = [identity(word)]
    for _ in range(rng.randint(1, 3)):
        start = rng.randrange(len(word) - 1)
        end = rng.randint(start + 2, min(len(word), start + 3))
        if ClaspSpec(word[start:end]).kind == "general":
            continue
        box = tensor(clasp_box(word[start:end]), identity(word[end:]))
        layers.append(tensor(identity(word[:start]), box))
    return word, closure(compose_all(layers))


def _check_clasped_degree(count: int, max_strands: int) -> None:
    """Assert clasps leave the minimum degree of the closed identity strands unchanged."""
    rng = random.Random(17)
    for _ in range(count):
        word, web = _clasped_configuration(rng, max_strands)
        bare = evaluate(WebSum.of(unclasp_boxes(web)))
        assert bare == RationalScalar(qint(3) ** len(word)), word
        assert evaluate_clasped(WebSum.of(web)).mdeg() == bare.mdeg(), word


def test_clasped_degree_matches_identities() -> None:
    """Test a few random clasped closures have the degree of their unclasped strands."""
    _check_clasped_degree(6, 3)


@pytest.mark.slow
def test_clasped_degree_on_many_configurations() -> None:
    """Test the clasped degree equality on fifty configurations of up to four strands."""
    _check_clasped_degree(50, 4)


def test_unclasp_boxes() -> None:
    """Test boxes become strands, also when two of them are stacked."""
    stacked = compose(clasp_box("-+"), clasp_box("-+"))
    strands = unclasp_boxes(stacked)
    assert not clasp_boxes(strands)
    assert strands.key() == identity("-+").key()
    assert evaluate(WebSum.of(unclasp_boxes(closure(clasp_box("--"))))) == quantum(3, 3)
    with pytest.raises(A2Error):
        unclasp_boxes(clasp_box("-+", "+-"))
