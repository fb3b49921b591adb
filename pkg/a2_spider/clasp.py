"""Clasps, stair-step and triangle webs, and the shortcuts clasps allow before reduction.

Clasps are built as reduced web sums and memoized per boundary. Inside larger webs a
clasp is kept as a box node labelled ``Box("clasp", bottom, top)`` until
:func:`expand_boxes` substitutes its expansion.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache
from itertools import pairwise

from a2_spider.errors import A2Error
from a2_spider.qalg import RationalScalar, Scalar, qbinom, qint
from a2_spider.skein import evaluate, reduce, resolve_crossing
from a2_spider.web import (
    Box,
    Face,
    Web,
    WebSum,
    box_web,
    cap_web,
    compose,
    compose_all,
    cup_web,
    faces,
    flip,
    h_web,
    identity,
    merge_web,
    stair_web,
    sum_compose_all,
    sum_tensor,
    tensor,
    validate_word,
)

CLASP_TAG = "clasp"
ABSORB_RULES = frozenset({"annihilate", "stack", "stair", "crossing"})


@dataclass(frozen=True, slots=True)
class ClaspSpec:
    """Boundary of a clasp: the bottom word and the top word it projects onto."""

    word: str
    target: str | None = None

    def __post_init__(self) -> None:
        validate_word(self.word)
        validate_word(self.top)
        if sorted(self.word) != sorted(self.top):
            raise A2Error(
                f"Clasp words {self.word!r} and {self.top!r} need equal counts of each sign."
            )

    @property
    def top(self) -> str:
        """Return the top word."""
        return self.word if self.target is None else self.target

    @property
    def minus(self) -> int:
        """Return the number of upward strands."""
        return self.word.count("-")

    @property
    def plus(self) -> int:
        """Return the number of downward strands."""
        return self.word.count("+")

    @property
    def kind(self) -> str:
        """Return one-row, two-row or general."""
        if self.word != self.top:
            return "general"
        if not self.minus or not self.plus:
            return "one-row"
        first = self.word[0]
        if self.word == first * self.word.count(first) + flip(first) * self.word.count(flip(first)):
            return "two-row"
        return "general"

    def label(self) -> Box:
        """Return the box label standing for this clasp."""
        return Box(CLASP_TAG, self.word, self.top)


@dataclass(frozen=True, slots=True)
class GeneratorI:
    """The two-vertex web I_j on strands j and j+1 (counted from 1) of m like strands."""

    j: int
    m: int
    sign: str = "-"

    def __post_init__(self) -> None:
        if not 1 <= self.j <= self.m - 1:
            raise A2Error(f"I_j needs 1 <= j <= m - 1, got j={self.j}, m={self.m}.")

    def web(self) -> Web:
        """Return the web."""
        return h_web(self.sign * self.m, self.j - 1)


# Constructions --------------------------------------------------------------------------


def clasp_one_row(m: int, sign: str = "-") -> WebSum:
    """Return the one-row clasp on m strands of one sign, reduced to basis webs."""
    if m < 0:
        raise A2Error(f"Clasp size must be non-negative, got {m}.")
    return _one_row(m, validate_word(sign)).copy()


@lru_cache(maxsize=None)
def _one_row(m: int, sign: str) -> WebSum:
    """Extend the clasp one strand at a time."""
    if m == 0:
        return WebSum.scalar(1)
    if m == 1:
        return WebSum.of(identity(sign))
    previous = sum_tensor(_one_row(m - 1, sign), WebSum.of(identity(sign)))
    sandwich = sum_compose_all([previous, h_web(sign * m, m - 2), previous])
    return reduce(previous - sandwich.scaled(RationalScalar(qint(m - 1), qint(m))))


def clasp_two_row(m: int, n: int, first: str = "-") -> WebSum:
    """Return the two-row clasp on first^m followed by n strands of the other sign."""
    if m < 0 or n < 0:
        raise A2Error(f"Clasp sizes must be non-negative, got ({m}, {n}).")
    return _two_row(m, n, validate_word(first)).copy()


@lru_cache(maxsize=None)
def _two_row(m: int, n: int, first: str) -> WebSum:
    """Sum the nested turnback terms between one-row clasps on each side."""
    second = flip(first)
    if n == 0:
        return _one_row(m, first)
    if m == 0:
        return _one_row(n, second)
    rows = sum_tensor(_one_row(m, first), _one_row(n, second))
    total: WebSum | None = None
    for i in range(min(m, n) + 1):
        coefficient = RationalScalar(qbinom(m, i) * qbinom(n, i), qbinom(m + n + 1, i)) * (-1) ** i
        term = sum_compose_all([rows, nested_turnback(m, n, i, first), rows]).scaled(coefficient)
        total = term if total is None else total + term
    assert total is not None
    return reduce(total)


def nested_turnback(m: int, n: int, i: int, first: str = "-") -> Web:
    """Return i nested caps on the middle of first^m second^n followed by i nested cups."""
    return compose(nested_caps(m, n, i, first), nested_cups(m, n, i, first))


def nested_caps(m: int, n: int, i: int, first: str = "-") -> Web:
    """Return i nested caps closing the middle of first^m second^n."""
    current = first * m + flip(first) * n
    webs = [identity(current)]
    for k in range(i):
        webs.append(cap_web(current, m - 1 - k))
        current = current[: m - 1 - k] + current[m + 1 - k :]
    return compose_all(webs)


def nested_cups(m: int, n: int, i: int, first: str = "-") -> Web:
    """Return i nested cups opening first^(m-i) second^(n-i) into first^m second^n."""
    second = flip(first)
    current = first * (m - i) + second * (n - i)
    webs = [identity(current)]
    for k in range(i):
        webs.append(cup_web(current, m - i + k, first + second))
        current = current[: m - i + k] + first + second + current[m - i + k :]
    return compose_all(webs)


def exchange(word: str, target: str) -> Web:
    """Return stair steps rearranging word into target by adjacent sign exchanges."""
    if sorted(validate_word(word)) != sorted(validate_word(target)):
        raise A2Error(f"Cannot rearrange {word!r} into {target!r}.")
    current = list(word)
    webs = [identity(word)]
    for i, sign in enumerate(target):
        if current[i] == sign:
            continue
        j = current.index(sign, i)
        for k in range(j - 1, i - 1, -1):
            webs.append(stair_web("".join(current), k))
            current[k], current[k + 1] = current[k + 1], current[k]
    return compose_all(webs)


def stair_step(n: int, m: int, first: str = "+") -> Web:
    """Return the ladder taking first^n second^m at the bottom to second^m first^n at the top."""
    if n < 1 or m < 1:
        raise A2Error(f"Stair step needs n, m >= 1, got ({n}, {m}).")
    second = flip(validate_word(first))
    return exchange(first * n + second * m, second * m + first * n)


def triangle(t: int, sign: str = "-") -> Web:
    """Return the triangle web joining two bundles of t strands into t strands of the other sign.

    The innermost pair merges first; the new strand climbs past the rest of the left bundle
    and the remaining 2(t - 1) strands form the next smaller triangle.
    """
    if t < 1:
        raise A2Error(f"Triangle web needs t >= 1, got {t}.")
    validate_word(sign)
    if t == 1:
        return merge_web(sign * 2, 0)
    webs = [merge_web(sign * (2 * t), t - 1)]
    current = list(sign * (t - 1) + flip(sign) + sign * (t - 1))
    for k in range(t - 2, -1, -1):
        webs.append(stair_web("".join(current), k))
        current[k], current[k + 1] = current[k + 1], current[k]
    webs.append(tensor(identity(flip(sign)), triangle(t - 1, sign)))
    return compose_all(webs)


def clasp_general(spec: ClaspSpec) -> WebSum:
    """Return the clasp between two words with the same sign counts."""
    return _general(spec.word, spec.top).copy()


@lru_cache(maxsize=None)
def _general(word: str, top: str) -> WebSum:
    """Conjugate the sorted two-row clasp by exchanges."""
    spec = ClaspSpec(word, top)
    if spec.kind == "one-row":
        return _one_row(len(word), word[0]) if word else WebSum.scalar(1)
    if spec.kind == "two-row":
        first = word[0]
        return _two_row(word.count(first), word.count(flip(first)), first)
    ordered = "-" * spec.minus + "+" * spec.plus
    return reduce(
        sum_compose_all(
            [exchange(word, ordered), _two_row(spec.minus, spec.plus, "-"), exchange(ordered, top)]
        )
    )


def single_clasp_expansion(m: int, sign: str = "-") -> WebSum:
    """Return the one-row clasp written with a single smaller clasp beside the first strand."""
    if m < 1:
        raise A2Error(f"Single clasp expansion needs m >= 1, got {m}.")
    word = sign * m
    lower = sum_tensor(WebSum.of(identity(sign)), _one_row(m - 1, sign))
    total: WebSum | None = None
    for j in range(m):
        chain = compose_all([identity(word)] + [h_web(word, k) for k in range(j)])
        term = sum_compose_all([lower, chain]).scaled(
            RationalScalar(qint(m - j), qint(m)) * (-1) ** j
        )
        total = term if total is None else total + term
    assert total is not None
    return total


# Unreduced expansions -------------------------------------------------------------------


def one_row_words(m: int) -> dict[tuple[int, ...], RationalScalar]:
    """Return the one-row clasp on m strands as I_j words with their coefficients.

    A word (j1, ..., jk) stands for I_j1 composed up to I_jk. Words are not reduced, so
    squares and bigons between neighbouring generators stay in place.
    """
    if m < 0:
        raise A2Error(f"Clasp size must be non-negative, got {m}.")
    return dict(_words(m))


@lru_cache(maxsize=None)
def _words(m: int) -> dict[tuple[int, ...], RationalScalar]:
    """Expand the recursion with one new generator I_(m-1) in each sandwich term."""
    if m <= 1:
        return {(): RationalScalar(1)}
    previous = _words(m - 1)
    ratio = RationalScalar(qint(m - 1), qint(m)) * -1
    words = dict(previous)
    for lower, low in previous.items():
        for upper, up in previous.items():
            words[(*lower, m - 1, *upper)] = ratio * low * up
    return words


def word_web(word: Iterable[int], m: int, sign: str = "-") -> Web:
    """Return the composition of I_j webs spelled by a word."""
    return compose_all([identity(sign * m)] + [GeneratorI(j, m, sign).web() for j in word])


def one_row_terms(m: int, sign: str = "-") -> list[tuple[RationalScalar, Web]]:
    """Return the unreduced one-row clasp as coefficient and web pairs."""
    validate_word(sign)
    words = one_row_words(m)
    return [(coefficient, word_web(word, m, sign)) for word, coefficient in words.items()]


def two_row_terms(m: int, n: int, t: int, first: str = "-") -> list[tuple[RationalScalar, Web]]:
    """Return the unreduced terms with t nested turnbacks of the two-row clasp.

    Each term puts one-row words M2, N2 below the turnbacks and M1, N1 above them.
    """
    if not 0 <= t <= min(m, n):
        raise A2Error(f"Turnback count t={t} is outside 0..{min(m, n)}.")
    second = flip(validate_word(first))
    ratio = RationalScalar(qbinom(m, t) * qbinom(n, t), qbinom(m + n + 1, t)) * (-1) ** t
    turnback = nested_turnback(m, n, t, first)
    left, right = one_row_terms(m, first), one_row_terms(n, second)
    rows = [
        (left_coefficient * right_coefficient, tensor(left_web, right_web))
        for left_coefficient, left_web in left
        for right_coefficient, right_web in right
    ]
    return [
        (ratio * low * up, compose_all([lower, turnback, upper]))
        for low, lower in rows
        for up, upper in rows
    ]


# Clasp boxes ----------------------------------------------------------------------------


def clasp_box(word: str, target: str | None = None) -> Web:
    """Return a rectangle holding one unexpanded clasp."""
    return box_web(ClaspSpec(word, target).label())


def clasp_boxes(web: Web) -> list[int]:
    """Return the clasp box nodes of a web."""
    return [node for node in web.boxes if web.labels[node].tag == CLASP_TAG]


def unclasp_boxes(web: Web) -> Web:
    """Replace every clasp box by parallel strands joining its bottom to its top."""
    builder = web.builder()
    for box in clasp_boxes(web):
        label = web.labels[box]
        if label.bottom != label.top:
            raise A2Error(f"Clasp {label.bottom!r}->{label.top!r} has no identity web.")
        for lower, upper in zip(*_sides(web, box)):
            builder.fuse(lower, upper)
        builder.remove_node(box)
    return builder.freeze()


def expand_boxes(total: WebSum) -> WebSum:
    """Substitute the expansion of every clasp box."""
    return total.map_terms(_expand_web)


def _expand_web(web: Web) -> WebSum:
    """Expand the clasp boxes of one web, one box at a time."""
    boxes = clasp_boxes(web)
    if not boxes:
        return WebSum.of(web)
    box = boxes[0]
    label = web.labels[box]
    expansion = _general(label.bottom, label.top)
    result = WebSum(web.bottom_word, web.top_word, expansion.denominator)
    for numerator, piece in expansion.terms():
        builder = web.builder()
        builder.substitute(box, piece)
        result.add_term(numerator, builder.freeze())
    return result.map_terms(_expand_web)


def evaluate_clasped(total: WebSum, rules: Iterable[str] = ABSORB_RULES) -> RationalScalar:
    """Evaluate a closed sum whose terms may hold clasp boxes."""
    return evaluate(expand_boxes(clasp_absorb(total, rules)))


# Absorption shortcuts -------------------------------------------------------------------


def _sides(web: Web, box: int) -> tuple[list[int], list[int]]:
    """Return the bottom and top darts of a box, each read left to right."""
    label = web.labels[box]
    ring = web.ports[box]
    return list(ring[: len(label.bottom)]), list(reversed(ring[len(label.bottom) :]))


def _outs(label: Box) -> list[bool]:
    """Return the dart directions of a box with the given label."""
    return [sign == "+" for sign in label.bottom] + [sign == "-" for sign in reversed(label.top)]


def _annihilated(web: Web) -> bool:
    """Return whether a cap or a trivalent vertex joins two adjacent ports of a clasp."""
    for box in clasp_boxes(web):
        for side in _sides(web, box):
            for left, right in pairwise(side):
                partner_left, partner_right = web.mate[left], web.mate[right]
                if partner_left == right:
                    return True
                node = web.owner[partner_left]
                if node == web.owner[partner_right] and web.kind[node] in ("source", "sink"):
                    return True
    return False


def _rebuild(
    web: Web,
    removed: Iterable[int],
    boxes: list[tuple[Box, list[int]]],
) -> Web:
    """Delete nodes and add boxes whose ports attach to the listed partner darts."""
    builder = web.builder()
    doomed = list(removed)
    for node in doomed:
        for dart in web.ports[node]:
            if dart in builder.mate:
                builder.unlink(dart)
    for node in doomed:
        builder.remove_node(node)
    for label, partners in boxes:
        _, darts = builder.add_node("box", _outs(label), label=label)
        for dart, partner in zip(darts, partners):
            builder.connect(dart, partner)
    return builder.freeze()


def _stack(web: Web) -> Web | None:
    """Merge two stacked clasps or drop a smaller clasp sitting on a larger one."""
    boxes = clasp_boxes(web)
    for small in boxes:
        small_bottom, small_top = _sides(web, small)
        for side in (small_bottom, small_top):
            if not side:
                continue
            big = web.owner[web.mate[side[0]]]
            if big == small or big not in boxes:
                continue
            big_bottom, big_top = _sides(web, big)
            facing = big_top if side is small_bottom else big_bottom
            if web.mate[side[0]] not in facing:
                continue
            start = facing.index(web.mate[side[0]])
            run = facing[start : start + len(side)]
            if len(run) != len(side) or any(web.mate[a] != b for a, b in zip(side, run)):
                continue
            small_label = web.labels[small]
            if len(side) == len(facing):
                return _merge(web, small, big, small_is_upper=side is small_bottom)
            if small_label.bottom == small_label.top:
                builder = web.builder()
                for lower, upper in zip(small_bottom, small_top):
                    builder.fuse(lower, upper)
                builder.remove_node(small)
                return builder.freeze()
    return None


def _merge(web: Web, small: int, big: int, small_is_upper: bool) -> Web:
    """Replace two fully stacked clasps by one."""
    upper, lower = (small, big) if small_is_upper else (big, small)
    lower_bottom, _ = _sides(web, lower)
    _, upper_top = _sides(web, upper)
    label = Box(CLASP_TAG, web.labels[lower].bottom, web.labels[upper].top)
    partners = [web.mate[dart] for dart in lower_bottom] + [
        web.mate[dart] for dart in reversed(upper_top)
    ]
    if any(web.owner[partner] in (upper, lower) for partner in partners):
        return web
    return _rebuild(web, [upper, lower], [(label, partners)])


def _corners(web: Web, face: Face) -> list[tuple[int, int, int]]:
    """Return (box, left port index, right port index) for each clasp corner on a face."""
    corners = []
    for k, dart in enumerate(face.darts):
        box = web.owner[dart]
        if web.kind[box] != "box" or web.labels[box].tag != CLASP_TAG:
            continue
        entering = web.mate[face.darts[k - 1]]
        if web.owner[entering] != box:
            continue
        ring = web.ports[box]
        i = ring.index(entering)
        if i == 0:
            continue
        n_bottom = len(web.labels[box].bottom)
        if i < n_bottom:
            corners.append((box, i - 1, i))
        elif i - 1 >= n_bottom:
            corners.append((box, i, i - 1))
    return corners


def _stair(web: Web, box: int, left: int, right: int) -> Web | None:
    """Absorb a two-vertex exchange sitting on adjacent ports of a clasp."""
    ring = web.ports[box]
    partners = [web.mate[dart] for dart in ring]
    nodes = (web.owner[partners[left]], web.owner[partners[right]])
    far = []
    for index, node in zip((left, right), nodes):
        free = [
            dart
            for dart in web.ports[node]
            if dart != partners[index] and web.owner[web.mate[dart]] not in nodes
        ]
        if len(free) != 1 or web.owner[web.mate[free[0]]] == box:
            return None
        far.append(web.mate[free[0]])
    partners[left], partners[right] = far
    label = web.labels[box]
    n_bottom = len(label.bottom)
    if left < n_bottom:
        bottom = list(label.bottom)
        bottom[left], bottom[right] = bottom[right], bottom[left]
        new_label = Box(CLASP_TAG, "".join(bottom), label.top)
    else:
        top = list(label.top)
        a, b = len(ring) - 1 - left, len(ring) - 1 - right
        top[a], top[b] = top[b], top[a]
        new_label = Box(CLASP_TAG, label.bottom, "".join(top))
    if any(web.owner[partner] == box for partner in partners):
        return None
    return _rebuild(web, [box, *nodes], [(new_label, partners)])


def _local(web: Web, rules: frozenset[str]) -> WebSum | None:
    """Apply the first face-local shortcut next to a clasp."""
    for face in faces(web):
        for box, left, right in _corners(web, face):
            others = [web.owner[dart] for dart in face.darts if web.owner[dart] != box]
            kinds = [web.kind[node] for node in others]
            if "crossing" in rules and face.size == 2 and kinds == ["crossing"]:
                return resolve_crossing(web, others[0])
            if (
                "stair" in rules
                and face.size == 3
                and len(set(others)) == 2
                and sorted(kinds) == ["sink", "source"]
            ):
                absorbed = _stair(web, box, left, right)
                if absorbed is not None:
                    return WebSum.of(absorbed)
    return None


def clasp_absorb(total: WebSum, rules: Iterable[str] = ABSORB_RULES) -> WebSum:
    """Apply clasp shortcuts until none is left.

    Rules: ``annihilate`` drops terms with a cap or a trivalent vertex on adjacent clasp
    ports, ``stack`` merges stacked clasps and drops sub-clasps, ``stair`` moves an
    exchange into the clasp boundary, ``crossing`` resolves a crossing lying on two
    adjacent clasp ports so that one of its terms is annihilated.
    """
    active = frozenset(rules)
    unknown = active - ABSORB_RULES
    if unknown:
        raise A2Error(f"Unknown clasp rule(s) {sorted(unknown)}.")
    result = WebSum(total.bottom, total.top, total.denominator)
    pending: list[tuple[Scalar, Web]] = list(total.terms())
    while pending:
        numerator, web = pending.pop()
        if not clasp_boxes(web):
            result.add_term(numerator, web)
            continue
        if "annihilate" in active and _annihilated(web):
            continue
        if "stack" in active:
            stacked = _stack(web)
            if stacked is not None and stacked is not web:
                pending.append((numerator, stacked))
                continue
        replaced = _local(web, active)
        if replaced is None:
            result.add_term(numerator, web)
            continue
        for term_numerator, term in replaced.terms():
            pending.append((numerator * term_numerator, term))
    return result
