"""Clasp identities checked instance by instance.

A web identity builds both sides as web sums on the same boundary. Both sides are closed
by the same random web, made of crossings, cups and exchanges so that clasps on the
boundary survive, and the closed values are compared exactly. An instance whose left side
closes to zero under every sampled web fails. A side that is the zero sum is checked by
reducing the other side to basis webs instead. A closure identity compares an engine
evaluation with a closed formula.
"""

import random
from collections.abc import Sequence
from dataclasses import dataclass

from a2_spider.clasp import (
    ClaspSpec,
    clasp_box,
    clasp_general,
    evaluate_clasped,
    exchange,
    expand_boxes,
    nested_turnback,
    single_clasp_expansion,
    triangle,
)
from a2_spider.errors import A2Error
from a2_spider.formulas import (
    bubble_total,
    corner_loop_coeff,
    delta_closure,
    gamma,
    partial_trace_coeff,
    recursion_coeffs,
    second_unclasp_coeff,
    single_clasp_decomp_coeff,
    theta,
    unclasp_coeffs,
)
from a2_spider.links import padded, theta_web, twisted_theta_web
from a2_spider.qalg import RationalScalar, Scalar
from a2_spider.registry import IdentityRegistry
from a2_spider.skein import parallel_map, reduce
from a2_spider.web import (
    Web,
    WebSum,
    cap_web,
    closure,
    compose_all,
    crossing_web,
    cup_web,
    flip,
    h_web,
    identity,
    merge_web,
    mirror,
    sum_closure,
    sum_compose,
    sum_partial_closure,
    tensor,
)

DEFAULT_SEEDS = 3
DEFAULT_MAX_STRANDS = 6

Sides = tuple[WebSum, WebSum]


@dataclass(frozen=True, slots=True)
class VerifyResult:
    """Outcome of one identity instance."""

    name: str
    params: tuple[int, ...]
    passed: bool
    seeds: int
    difference: RationalScalar | None = None
    note: str | None = None

    def to_dict(self) -> dict[str, object]:
        """Return report-row labels and display values."""
        return {
            "Identity": self.name,
            "Parameters": ", ".join(map(str, self.params)),
            "Seeds": self.seeds,
            "Status": "pass" if self.passed else "FAIL",
            "Difference": self.note or ("-" if self.difference is None else str(self.difference)),
        }

    def to_json(self) -> dict[str, object]:
        """Return a JSON-ready mapping."""
        return {
            "name": self.name,
            "params": list(self.params),
            "passed": self.passed,
            "seeds": self.seeds,
            "difference": None if self.difference is None else self.difference.to_json(),
            "note": self.note,
        }


# Building blocks --------------------------------------------------------------------------


def _clasp(word: str, target: str | None = None) -> Web:
    """Return a clasp box, or plain strands when the clasp is trivial."""
    if len(word) <= 1:
        return identity(word)
    return clasp_box(word, target)


def _sum(*terms: tuple[RationalScalar | Scalar | int, Web]) -> WebSum:
    """Return a linear combination of webs."""
    total: WebSum | None = None
    for coefficient, web in terms:
        term = WebSum.of(web, coefficient)
        total = term if total is None else total + term
    assert total is not None
    return total


def diamond(m: int, n: int, k: int) -> Web:
    """Return two clasped bundles joined through a triangle and its mirror image."""
    outer = tensor(_clasp("-" * m), _clasp("-" * n))
    webs = [outer]
    if k:
        webs += [
            padded("-" * (m - k), triangle(k, "-"), "-" * (n - k)),
            padded("-" * (m - k), mirror(triangle(k, "-")), "-" * (n - k)),
        ]
    webs.append(outer)
    return compose_all(webs)


def bundle_crossing(left: str, right: str, over: str) -> Web:
    """Return the right bundle crossing leftwards over or under the left bundle."""
    current = left + right
    webs = [identity(current)]
    for i in range(len(right)):
        for position in range(len(left) - 1 + i, i - 1, -1):
            webs.append(crossing_web(current, position, over))  # type: ignore[arg-type]
            current = (
                current[:position] + current[position + 1] + current[position]
                + current[position + 2 :]
            )
    return compose_all(webs)


# Random closures --------------------------------------------------------------------------


def _scramble(word: str, rng: random.Random) -> Web:
    """Return a random endomorphism of a word made of H webs and like-sign crossings."""
    webs = [identity(word)]
    pairs = [j for j in range(len(word) - 1) if word[j] == word[j + 1]]
    for _ in range(rng.randint(0, 2) if pairs else 0):
        j = rng.choice(pairs)
        if rng.random() < 0.5:
            webs.append(h_web(word, j))
        else:
            webs.append(crossing_web(word, j, rng.choice(["\\", "/"])))
    return compose_all(webs)


def _reducer(word: str, rng: random.Random) -> Web:
    """Return a random web from word to at most one strand, by caps and merges."""
    webs = [identity(word)]
    current = word
    while len(current) > 1:
        j = rng.randrange(len(current) - 1)
        if current[j] == current[j + 1]:
            webs.append(merge_web(current, j))
            current = current[:j] + flip(current[j]) + current[j + 2 :]
        else:
            webs.append(cap_web(current, j))
            current = current[:j] + current[j + 2 :]
    return compose_all(webs)


def _threader(top: str, bottom: str, pairs: int, rng: random.Random) -> Web:
    """Return random crossings on top, cups for the missing -+ pairs and exchanges onto bottom."""
    webs = [identity(top)]
    current = top
    for _ in range(rng.randint(0, 2) if len(top) > 1 else 0):
        j = rng.randrange(len(current) - 1)
        webs.append(crossing_web(current, j, rng.choice(["\\", "/"])))
        current = current[:j] + current[j + 1] + current[j] + current[j + 2 :]
    for _ in range(pairs):
        webs.append(cup_web(current, len(current), "-+"))
        current += "-+"
    webs.append(exchange(current, bottom))
    return compose_all(webs)


def random_closer(bottom: str, top: str, rng: random.Random) -> Web:
    """Return a random web from top back to bottom.

    When bottom holds the signs of top and some more -+ pairs, the web is built from
    crossings, cups and exchanges, so no cap or vertex joins two neighbouring top points
    and a clasp on either side survives the closure. Other boundaries are scrambled and
    reduced to a single strand or nothing on both sides.
    """
    pairs = bottom.count("-") - top.count("-")
    if pairs >= 0 and bottom.count("+") - top.count("+") == pairs:
        return _threader(top, bottom, pairs, rng)
    upper = compose_all([_scramble(top, rng), _reducer(top, rng)])
    lower = compose_all([_scramble(bottom, rng), _reducer(bottom, rng)])
    if upper.top_word != lower.top_word:
        raise A2Error(f"No closing web joins {top!r} back to {bottom!r}.")
    return compose_all([upper, mirror(lower)])


def _closed_value(side: WebSum, closer: Web) -> RationalScalar:
    """Evaluate a side after gluing the closing web on top and closing up."""
    return evaluate_clasped(sum_closure(sum_compose(side, WebSum.of(closer))))


# Web identities ---------------------------------------------------------------------------


@IdentityRegistry.register("singleexp", cases=[(1,), (2,), (3,), (4,)], strands=lambda m: m)
def single_expansion_sides(m: int) -> Sides:
    """A one-row clasp equals its expansion beside one smaller clasp."""
    return WebSum.of(clasp_box("-" * m)), single_clasp_expansion(m)


@IdentityRegistry.register("idempotence", cases=[(2, 0), (1, 1), (2, 1), (3, 0), (2, 2), (3, 1)])
def idempotence_sides(m: int, n: int) -> Sides:
    """A clasp composed with itself is the clasp."""
    clasp = clasp_general(ClaspSpec("-" * m + "+" * n))
    return sum_compose(clasp, clasp), clasp


@IdentityRegistry.register("capkill", cases=[(1, 1), (2, 1), (1, 2), (2, 2)])
def cap_kill_sides(m: int, n: int) -> Sides:
    """A cap on a clasp vanishes."""
    word = "-" * m + "+" * n
    lhs = sum_compose(clasp_general(ClaspSpec(word)), WebSum.of(cap_web(word, m - 1)))
    return lhs, WebSum(word, word[: m - 1] + word[m + 1 :])


@IdentityRegistry.register("forkkill", cases=[(2, 0), (3, 0), (2, 1), (3, 1)])
def fork_kill_sides(m: int, n: int) -> Sides:
    """A trivalent fork on a clasp vanishes."""
    word = "-" * m + "+" * n
    lhs = sum_compose(clasp_general(ClaspSpec(word)), WebSum.of(merge_web(word, 0)))
    return lhs, WebSum(word, "+" + word[2:])


@IdentityRegistry.register("clasptwist_a", cases=[(1, 1), (1, 2), (2, 2)])
def clasp_twist_parallel_sides(m: int, n: int) -> Sides:
    """Crossing two parallel bundles on a clasp multiplies it by q^(-mn/3)."""
    word = "-" * (m + n)
    lhs = sum_compose(
        clasp_general(ClaspSpec(word)), WebSum.of(bundle_crossing("-" * m, "-" * n, "\\"))
    )
    return lhs, clasp_general(ClaspSpec(word)).scaled(Scalar.monomial(-2 * m * n))


@IdentityRegistry.register("clasptwist_b", cases=[(1, 1), (2, 1), (1, 2)])
def clasp_twist_antiparallel_sides(m: int, n: int) -> Sides:
    """Crossing antiparallel bundles on a clasp gives (-1)^(mn) q^(mn/6) times the clasp."""
    word = "-" * m + "+" * n
    lhs = sum_compose(
        clasp_general(ClaspSpec(word)), WebSum.of(bundle_crossing("-" * m, "+" * n, "/"))
    )
    rhs = clasp_general(ClaspSpec(word, "+" * n + "-" * m))
    return lhs, rhs.scaled(Scalar.monomial(m * n, (-1) ** (m * n)))


@IdentityRegistry.register(
    "unclasp", cases=[(0, 1), (1, 1), (0, 2), (1, 2), (2, 1)], strands=lambda n, k: n + 1 + k
)
def unclasp_sides(n: int, k: int) -> Sides:
    """A one-row clasp splits off its last k strands."""
    word = "-" * (n + 1 + k)
    lower = tensor(_clasp("-" * (n + 1)), identity("-" * k))
    middle = tensor(identity("-"), _clasp("-" * (n + k)))
    chain = [h_web(word, i) for i in range(n + 1)]
    first = compose_all([lower, middle, lower])
    second = compose_all([lower, middle, *chain, tensor(_clasp("-" * (n + 1)), _clasp("-" * k))])
    return WebSum.of(_clasp(word)), _sum((1, first), (unclasp_coeffs(n, k)[0], second))


@IdentityRegistry.register(
    "unclasp2", cases=[(0, 1), (1, 1), (0, 2), (1, 2), (2, 1)], strands=lambda n, k: n + 1 + k
)
def unclasp_two_row_sides(n: int, k: int) -> Sides:
    """A two-row clasp splits off its downward strands."""
    word = "-" * (n + 1) + "+" * k
    lower = tensor(_clasp("-" * (n + 1)), identity("+" * k))
    middle = tensor(identity("-"), _clasp("-" * n + "+" * k))
    chain = [h_web(word, i) for i in range(n)]
    turnback = [cap_web(word, n), cup_web("-" * n + "+" * (k - 1), n, "-+")]
    first = compose_all([lower, middle, lower])
    second = compose_all(
        [lower, middle, *chain, *turnback, tensor(_clasp("-" * (n + 1)), _clasp("+" * k))]
    )
    return WebSum.of(_clasp(word)), _sum((1, first), (unclasp_coeffs(n, k)[1], second))


@IdentityRegistry.register(
    "secondunclasp", cases=[(0, 1), (1, 1), (0, 2), (1, 2), (2, 1)], strands=lambda k, l: k + l + 1
)
def second_unclasp_sides(k: int, l: int) -> Sides:  # noqa: E741
    """A two-row clasp splits off its first upward strand."""
    word = "-" * (k + 1) + "+" * l
    rows = tensor(_clasp("-" * (k + 1)), _clasp("+" * l))
    first = compose_all([tensor(identity("-"), _clasp("-" * k + "+" * l)), rows])
    moved = "+" + "-" * k + "+" * (l - 1)
    second = compose_all(
        [
            tensor(identity("-"), _clasp("-" * k + "+" * l, moved)),
            cap_web("-" + moved, 0),
            cup_web("-" * k + "+" * (l - 1), k, "-+"),
            rows,
        ]
    )
    return WebSum.of(_clasp(word)), _sum((1, first), (second_unclasp_coeff(k, l), second))


@IdentityRegistry.register("partialtrace", cases=[(1, 0, 1), (1, 1, 1), (2, 0, 1), (1, 1, 2)])
def partial_trace_sides(m: int, n: int, l: int) -> Sides:  # noqa: E741
    """Closing the last l upward strands of a clasp leaves a multiple of the smaller clasp."""
    lhs = sum_partial_closure(WebSum.of(_clasp("-" * m + "+" * n + "-" * l)), l, "right")
    return lhs, WebSum.of(_clasp("-" * m + "+" * n), partial_trace_coeff(m, n, l))


@IdentityRegistry.register("cornerloop", cases=[(0,), (1,), (2,)], strands=lambda k: 2 * k + 2)
def corner_loop_sides(k: int) -> Sides:
    """A turnback at the corner of an exchange between clasped bundles slides through it."""
    word = "+" * (k + 1) + "-" * (k + 1)
    swapped = "-" * (k + 1) + "+" * (k + 1)
    bottom = tensor(_clasp("+" * (k + 1)), _clasp("-" * (k + 1)))
    lhs = compose_all(
        [
            bottom,
            exchange(word, swapped),
            tensor(_clasp("-" * (k + 1)), _clasp("+" * (k + 1))),
            cap_web(swapped, k),
        ]
    )
    rhs = compose_all(
        [
            bottom,
            cap_web(word, k),
            exchange("+" * k + "-" * k, "-" * k + "+" * k),
            tensor(_clasp("-" * k), _clasp("+" * k)),
        ]
    )
    return WebSum.of(lhs), WebSum.of(rhs, corner_loop_coeff(k))


@IdentityRegistry.register("slidecorner", cases=[(1,), (2,)], strands=lambda k: 2 * k + 2)
def slide_corner_sides(k: int) -> Sides:
    """A corner turnback slides across an exchange and a chain of H webs."""
    word = "+" * (k + 1) + "-" * (k + 1)
    bottom = tensor(_clasp("+" * (k + 1)), _clasp("-" * (k + 1)))
    shifted = "+" + "-" * (k + 1) + "+" * k
    lhs = compose_all(
        [
            bottom,
            padded("+", exchange("+" * k + "-" * k, "-" * k + "+" * k), "-"),
            padded("+" + "-" * k, exchange("+" * k + "-", "-" + "+" * k), ""),
            *[h_web(shifted, i) for i in range(k, 0, -1)],
            cap_web(shifted, 0),
        ]
    )
    rhs = compose_all([bottom, cap_web(word, k), exchange("+" * k + "-" * k, "-" * k + "+" * k)])
    return WebSum.of(lhs), WebSum.of(rhs)


@IdentityRegistry.register("throughclasp", cases=[(1,), (2,), (3,)], strands=lambda k: k + 1)
def through_clasp_sides(k: int) -> Sides:
    """A clasp absorbs the smaller clasp on the strands an exchange carries into it."""
    word = "+" + "-" * k
    upper = [exchange(word, "-" * k + "+"), tensor(_clasp("-" * k), identity("+"))]
    lhs = compose_all(upper)
    rhs = compose_all([padded("+", _clasp("-" * (k - 1)), "-"), *upper])
    return WebSum.of(lhs), WebSum.of(rhs)


@IdentityRegistry.register("singleclaspdecomp", cases=[(1, 1), (2, 1), (2, 2), (3, 1)])
def single_clasp_decomp_sides(m: int, n: int) -> Sides:
    """A one-row clasp is a sum of diamonds between two smaller clasps."""
    rhs = _sum(
        *[(single_clasp_decomp_coeff(m, n, k), diamond(m, n, k)) for k in range(min(m, n) + 1)]
    )
    return WebSum.of(_clasp("-" * (m + n))), rhs


@IdentityRegistry.register(
    "recursion", cases=[(2, 2, 1), (2, 2, 2), (2, 3, 1)], strands=lambda m, n, k: m + n
)
def recursion_sides(m: int, n: int, k: int) -> Sides:
    """Closing the first strand of a diamond gives two smaller diamonds."""
    lhs = sum_partial_closure(WebSum.of(diamond(m, n, k)), 1)
    first, second = recursion_coeffs(m, k)
    terms = [(first, diamond(m - 1, n, k - 1))]
    if k <= m - 1:
        terms.append((second, diamond(m - 1, n, k)))
    return lhs, _sum(*terms)


@IdentityRegistry.register("bubbleskein", cases=[(1, 1, 1), (2, 1, 1), (2, 2, 1), (2, 2, 2)],
                           strands=lambda m, n, k: m + n)
def bubble_skein_sides(m: int, n: int, k: int) -> Sides:
    """A bubble between two clasps is a scalar multiple of the outer clasp."""
    left, right = "-" * (m - k), "-" * (n - k)
    word = left + "+" * k + right
    lhs = compose_all(
        [
            _clasp(word),
            padded(left, mirror(triangle(k, "-")), right),
            tensor(_clasp("-" * m), _clasp("-" * n)),
            padded(left, triangle(k, "-"), right),
            _clasp(word),
        ]
    )
    return WebSum.of(lhs), WebSum.of(_clasp(word), bubble_total(m, n, k))


@IdentityRegistry.register("triangledecomp", cases=[(2, 1), (3, 1), (3, 2)],
                           strands=lambda k, j: 2 * k)
def triangle_decomp_sides(k: int, j: int) -> Sides:
    """A triangle web splits into two smaller triangles joined by an exchange."""
    if not 1 <= j < k:
        raise A2Error(f"Triangle decomposition needs 1 <= j < k, got ({k}, {j}).")
    rest = "-" * (k - j)
    rhs = compose_all(
        [
            padded(rest, triangle(j, "-"), rest),
            tensor(exchange(rest + "+" * j, "+" * j + rest), identity(rest)),
            tensor(identity("+" * j), triangle(k - j, "-")),
        ]
    )
    return WebSum.of(triangle(k, "-")), WebSum.of(rhs)


@IdentityRegistry.register("squareexpansion", cases=[(1,), (2,)], strands=lambda n: 2 * n)
def square_expansion_sides(n: int) -> Sides:
    """A clasped square between two pairs of bundles is a sum of nested turnbacks."""
    bundle = "-" * n
    lower = compose_all(
        [
            tensor(mirror(triangle(n, "-")), identity(bundle)),
            padded(bundle, _clasp(bundle), bundle),
            tensor(identity(bundle), triangle(n, "-")),
        ]
    )
    rows = tensor(_clasp("+" * n), _clasp(bundle))
    lhs = compose_all([rows, lower, tensor(_clasp(bundle), _clasp("+" * n)), mirror(lower), rows])
    rhs = _sum(*[(1, compose_all([rows, nested_turnback(n, n, k, "+"), rows]))
                 for k in range(n + 1)])
    return WebSum.of(lhs), rhs


# Closure identities -----------------------------------------------------------------------


def _closed(web: Web) -> RationalScalar:
    """Evaluate a closed clasped web."""
    return evaluate_clasped(WebSum.of(web))


@IdentityRegistry.register("deltaclosure", cases=[(1, 0), (2, 0), (1, 1), (2, 1), (3, 0)],
                           form="closure")
def delta_closure_values(m: int, n: int) -> tuple[RationalScalar, RationalScalar]:
    """The closure of a two-row clasp is [m+1][n+1][m+n+2]/[2]."""
    return _closed(closure(_clasp("-" * m + "+" * n))), RationalScalar(delta_closure(m, n))


@IdentityRegistry.register("thetaA", cases=[(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)],
                           form="closure", strands=lambda n, j: 2 * n)
def theta_a_values(n: int, j: int) -> tuple[RationalScalar, RationalScalar]:
    """The closed parallel twist web evaluates to its theta formula."""
    return _closed(theta_web("A", j, n)), theta("A", n, j)


@IdentityRegistry.register("thetaB", cases=[(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)],
                           form="closure", strands=lambda n, j: 2 * n)
def theta_b_values(n: int, j: int) -> tuple[RationalScalar, RationalScalar]:
    """The closed antiparallel twist web evaluates to its theta formula."""
    return _closed(theta_web("B", j, n)), theta("B", n, j)


@IdentityRegistry.register("gammaA", cases=[(1, 0), (1, 1), (2, 1)], form="closure",
                           strands=lambda n, j: 2 * n)
def gamma_a_values(n: int, j: int) -> tuple[RationalScalar, RationalScalar]:
    """A half twist on a parallel twist web multiplies it by gamma."""
    value = _closed(twisted_theta_web("A", j, n, 1))
    return value, theta("A", n, j) * gamma("A", n, j)


@IdentityRegistry.register("gammaB", cases=[(1, 0), (1, 1), (2, 1)], form="closure",
                           strands=lambda n, j: 2 * n)
def gamma_b_values(n: int, j: int) -> tuple[RationalScalar, RationalScalar]:
    """A full twist on an antiparallel twist web multiplies it by gamma squared."""
    value = _closed(twisted_theta_web("B", j, n, 2))
    return value, theta("B", n, j) * gamma("B", n, j) ** 2


# Checking ---------------------------------------------------------------------------------


def _check(name: str, params: tuple[int, ...], seeds: int) -> VerifyResult:
    """Check one instance of an identity."""
    definition = IdentityRegistry.get(name)
    if definition.form == "closure":
        lhs, rhs = definition.build(*params)
        difference = (lhs - rhs).reduced()
        return VerifyResult(name, params, difference.is_zero(), 0,
                            None if difference.is_zero() else difference)
    lhs_sum, rhs_sum = definition.build(*params)
    if (lhs_sum.bottom, lhs_sum.top) != (rhs_sum.bottom, rhs_sum.top):
        raise A2Error(f"{name}{params}: the two sides have different boundaries.")
    if rhs_sum.is_zero():
        remainder = reduce(expand_boxes(lhs_sum))
        if remainder.is_zero():
            return VerifyResult(name, params, True, 0)
        return VerifyResult(name, params, False, 0, note=f"{len(remainder)} basis web(s) remain")
    survived = False
    for seed in range(seeds):
        rng = random.Random(f"{name}:{params}:{seed}")
        closer = random_closer(lhs_sum.bottom, lhs_sum.top, rng)
        lhs = _closed_value(lhs_sum, closer)
        difference = (lhs - _closed_value(rhs_sum, closer)).reduced()
        if not difference.is_zero():
            return VerifyResult(name, params, False, seed + 1, difference)
        survived = survived or not lhs.is_zero()
    if not survived:
        return VerifyResult(name, params, False, seeds, note="every closure vanished")
    return VerifyResult(name, params, True, seeds)


def verify_identity(
    name: str,
    params: Sequence[int] | None = None,
    seeds: int = DEFAULT_SEEDS,
    max_strands: int = DEFAULT_MAX_STRANDS,
) -> list[VerifyResult]:
    """Check an identity at the given parameters, or at every registered case in bounds."""
    definition = IdentityRegistry.get(name)
    if params is not None:
        cases = [tuple(params)]
    else:
        cases = [case for case in definition.cases if definition.strands(*case) <= max_strands]
    return parallel_map(lambda case: _check(name, case, seeds), cases)


def verify_all(
    only: Sequence[str] | None = None,
    seeds: int = DEFAULT_SEEDS,
    max_strands: int = DEFAULT_MAX_STRANDS,
) -> list[VerifyResult]:
    """Check every registered identity, or the named ones."""
    names = list(only) if only else IdentityRegistry.ls()
    results = []
    for name in names:
        results.extend(verify_identity(name, seeds=seeds, max_strands=max_strands))
    return results
