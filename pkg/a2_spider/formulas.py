"""Closed-form scalars of clasped webs: closures, theta values, twist and clasp coefficients.

Every function here has a web counterpart evaluated by the skein engine, so the two
layers check each other. Quantum binomials vanish outside 0 <= k <= n.
"""

from fractions import Fraction
from typing import Literal

import pandas as pd

from a2_spider.errors import A2Error
from a2_spider.qalg import RationalScalar, Scalar, qbinom, qint
from a2_spider.registry import FormulaRegistry

TwistKind = Literal["A", "B"]

# Expected growth of mdeg from index j - 1 to j, as functions of (n, j).
EXPECTED_STEPS: dict[TwistKind, dict[str, object]] = {
    "A": {
        "delta": lambda n, j: Fraction(1),
        "theta": lambda n, j: Fraction(1, 2),
        "gamma": lambda n, j: Fraction(n - j + 1),
    },
    "B": {
        "delta": lambda n, j: Fraction(2),
        "theta": lambda n, j: Fraction(1),
        "gamma": lambda n, j: Fraction(2 * n - 2 * j + 3, 2),
    },
}


def _check_index(n: int, j: int) -> None:
    """Require 0 <= j <= n."""
    if not 0 <= j <= n:
        raise A2Error(f"Index j={j} is outside 0..{n}.")


def _check_kind(kind: str) -> TwistKind:
    """Require a twist kind A or B."""
    if kind not in ("A", "B"):
        raise A2Error(f"Twist kind must be 'A' or 'B', got {kind!r}.")
    return kind  # type: ignore[return-value]


def _mdeg(value: Scalar | RationalScalar) -> Fraction:
    """Return the minimum degree of a polynomial or of a quotient."""
    return RationalScalar.coerce(value).mdeg()


@FormulaRegistry.register
def delta_closure(m: int, n: int) -> Scalar:
    """Return the closure of the clasp on m upward and n downward strands."""
    if m < 0 or n < 0:
        raise A2Error(f"Closure sizes must be non-negative, got ({m}, {n}).")
    return (qint(m + 1) * qint(n + 1) * qint(m + n + 2)).divide(qint(2))


# Twist regions on two parallel strands ------------------------------------------------


@FormulaRegistry.register
def delta_A(n: int, j: int) -> Scalar:  # pylint: disable=invalid-name
    """Return the closure of the middle clasp of the parallel twist web."""
    _check_index(n, j)
    return delta_closure(2 * n - 2 * j, j)


@FormulaRegistry.register
def theta_A(n: int, j: int) -> RationalScalar:  # pylint: disable=invalid-name
    """Return the closure of the parallel twist web with j strands through the triangles.

    The clasps make this a quotient; from n = 2 on it is not a Laurent polynomial.
    """
    _check_index(n, j)
    total = RationalScalar(0)
    for t in range(min(n - j, j) + 1):
        for s in range(min(j - t, n - j + t) + 1):
            numerator = (
                qbinom(n - j, t) * qbinom(j, t) * qbinom(j - t + 1, s + 1) * qbinom(n - j + t, s)
            )
            total = total + RationalScalar(numerator * (-1) ** (s + t), qbinom(n, s) * qbinom(n, t))
    return (total * delta_A(n, j)).reduced()


@FormulaRegistry.register
def gamma_A(n: int, j: int) -> Scalar:  # pylint: disable=invalid-name
    """Return the eigenvalue of one parallel negative half twist on the j-th summand."""
    _check_index(n, j)
    return Scalar.monomial(-2 * n * n + 6 * n * j - 3 * j * j + 3 * j, (-1) ** j)


# Twist regions on two antiparallel strands --------------------------------------------


@FormulaRegistry.register
def delta_B(n: int, j: int) -> Scalar:  # pylint: disable=invalid-name
    """Return the closure of the middle clasp of the antiparallel twist web."""
    _check_index(n, j)
    return delta_closure(n - j, n - j)


@FormulaRegistry.register
def theta_B(n: int, j: int) -> RationalScalar:  # pylint: disable=invalid-name
    """Return the closure of the antiparallel twist web with j turnbacks."""
    _check_index(n, j)
    ratio = RationalScalar(qbinom(2 * n - j + 2, 2 * n - 2 * j + 2), qbinom(n, j) ** 2)
    return (ratio * delta_B(n, j)).reduced()


@FormulaRegistry.register
def gamma_B(n: int, j: int) -> Scalar:  # pylint: disable=invalid-name
    """Return the eigenvalue of one antiparallel positive half twist on the j-th summand."""
    _check_index(n, j)
    return Scalar.monomial(-n * n + 6 * n * j - 3 * j * j + 6 * j, (-1) ** j)


def delta(kind: TwistKind, n: int, j: int) -> Scalar:
    """Dispatch to delta_A or delta_B."""
    return delta_A(n, j) if _check_kind(kind) == "A" else delta_B(n, j)


def theta(kind: TwistKind, n: int, j: int) -> RationalScalar:
    """Dispatch to theta_A or theta_B."""
    return theta_A(n, j) if _check_kind(kind) == "A" else theta_B(n, j)


def gamma(kind: TwistKind, n: int, j: int) -> Scalar:
    """Dispatch to gamma_A or gamma_B."""
    return gamma_A(n, j) if _check_kind(kind) == "A" else gamma_B(n, j)


@FormulaRegistry.register
def big_gamma(kind: TwistKind, n: int, t: int, l: int) -> RationalScalar:
    """Return the coefficient of the t-th twist web in l half twists of the given kind."""
    _check_kind(kind)
    _check_index(n, t)
    if l < 1:
        raise A2Error(f"A twist region needs l >= 1 half twists, got {l}.")
    if kind == "B" and l % 2:
        raise A2Error(f"Antiparallel twist regions need an even number of half twists, got {l}.")
    weight = RationalScalar(gamma(kind, n, t) ** l * delta(kind, n, t))
    return (weight / theta(kind, n, t)).reduced()


def degree_steps(kind: TwistKind, n: int) -> pd.DataFrame:
    """Tabulate mdeg increments of delta, theta and gamma against their expected values."""
    _check_kind(kind)
    rows = []
    for j in range(1, n + 1):
        row: dict[str, object] = {"j": j}
        for name, function in (("delta", delta), ("theta", theta), ("gamma", gamma)):
            step = _mdeg(function(kind, n, j)) - _mdeg(function(kind, n, j - 1))
            expected = EXPECTED_STEPS[kind][name](n, j)  # type: ignore[operator]
            row[name] = step
            row[f"{name}_expected"] = expected
        rows.append(row)
    columns = ["j", "delta", "delta_expected", "theta", "theta_expected", "gamma", "gamma_expected"]
    return pd.DataFrame(rows, columns=columns).set_index("j")


# Clasp identities -----------------------------------------------------------------------


@FormulaRegistry.register
def partial_trace_coeff(m: int, n: int, l: int) -> RationalScalar:
    """Return the factor left after closing l extra upward strands of a clasp."""
    if min(m, n, l) < 0:
        raise A2Error(f"Partial trace sizes must be non-negative, got ({m}, {n}, {l}).")
    return RationalScalar(delta_closure(m + l, n), delta_closure(m, n)).reduced()


@FormulaRegistry.register
def single_clasp_expansion_coeff(m: int, j: int) -> RationalScalar:
    """Return the coefficient of the j-step chain in the expansion of a one-row clasp."""
    if not 0 <= j < m:
        raise A2Error(f"Chain length j={j} is outside 0..{m - 1}.")
    return RationalScalar(qint(m - j) * (-1) ** j, qint(m)).reduced()


@FormulaRegistry.register
def single_clasp_decomp_coeff(m: int, n: int, k: int) -> RationalScalar:
    """Return the coefficient of the k-diamond term in the decomposition of a one-row clasp."""
    if not 0 <= k <= min(m, n):
        raise A2Error(f"Index k={k} is outside 0..{min(m, n)}.")
    return RationalScalar(qbinom(m, k) * qbinom(n, k) * (-1) ** k, qbinom(m + n, k)).reduced()


def single_clasp_decomp_recursion(m: int, n: int, k: int) -> RationalScalar:
    """Return the next decomposition coefficient from the partial-trace recursion."""
    if not 2 <= m <= n or not 0 <= k < m:
        raise A2Error(
            f"Recursion needs 2 <= m <= n and 0 <= k < m, got (m, n, k) = ({m}, {n}, {k})."
        )
    first = RationalScalar(
        qint(m + n + 2) * qint(m) ** 2, qint(m + n) * qint(k + 1) * qint(k + 2)
    )
    second = RationalScalar(qint(m + k + 2) * qint(m - k), qint(k + 1) * qint(k + 2))
    previous = single_clasp_decomp_coeff(m - 1, n, k)
    return (first * previous - second * single_clasp_decomp_coeff(m, n, k)).reduced()


@FormulaRegistry.register
def bubble_coeff(m: int, n: int, k: int, j: int, i: int) -> RationalScalar:
    """Return one term of the double sum evaluating the bubble between two clasps."""
    if not (0 <= k <= min(m, n) and 0 <= j <= min(m - k, k) and 0 <= i <= min(k - j, n - k + j)):
        raise A2Error(f"Bubble indices (m, n, k, j, i) = ({m}, {n}, {k}, {j}, {i}) out of range.")
    numerator = (
        qbinom(m - k, j) * qbinom(k, j) * qbinom(k - j + 1, i + 1) * qbinom(n - k + j, i)
    )
    return RationalScalar(numerator * (-1) ** (i + j), qbinom(m, j) * qbinom(n, i)).reduced()


@FormulaRegistry.register
def bubble_total(m: int, n: int, k: int) -> RationalScalar:
    """Return the scalar by which the bubble acts on its outer clasp."""
    total = RationalScalar(0)
    for j in range(min(m - k, k) + 1):
        for i in range(min(k - j, n - k + j) + 1):
            total = total + bubble_coeff(m, n, k, j, i)
    return total.reduced()


@FormulaRegistry.register
def theta_from_bubble(n: int, j: int) -> RationalScalar:
    """Return theta_A through the bubble scalar times the outer clasp closure."""
    _check_index(n, j)
    return (bubble_total(n, n, j) * delta_A(n, j)).reduced()


@FormulaRegistry.register
def unclasp_coeffs(n: int, k: int) -> tuple[RationalScalar, RationalScalar]:
    """Return the one-row and two-row coefficients splitting a clasp after n + 1 strands."""
    if n < 0 or k < 1:
        raise A2Error(f"Unclasping needs n >= 0 and k >= 1, got ({n}, {k}).")
    sign = (-1) ** (n + 1)
    return (
        RationalScalar(qint(k) * sign, qint(n + k + 1)).reduced(),
        RationalScalar(qint(k) * sign, qint(n + k + 2)).reduced(),
    )


@FormulaRegistry.register
def second_unclasp_coeff(k: int, l: int) -> RationalScalar:
    """Return the coefficient splitting an upward strand off a two-row clasp."""
    if k < 0 or l < 1:
        raise A2Error(f"Second unclasping needs k >= 0 and l >= 1, got ({k}, {l}).")
    return RationalScalar(qint(l) * (-1) ** (k + 1), qint(k + l + 2)).reduced()


@FormulaRegistry.register
def corner_loop_coeff(k: int) -> RationalScalar:
    """Return the factor for sliding a corner turnback past two clasped bundles."""
    if k < 0:
        raise A2Error(f"Corner loop needs k >= 0, got {k}.")
    return RationalScalar(qint(k + 2), qint(k + 1)).reduced()


@FormulaRegistry.register
def recursion_coeffs(m: int, k: int) -> tuple[RationalScalar, RationalScalar]:
    """Return the two coefficients of a diamond term after closing its leftmost strand."""
    if not 1 <= k <= m:
        raise A2Error(f"Recursion needs 1 <= k <= m, got (m, k) = ({m}, {k}).")
    square = qint(m) ** 2
    return (
        RationalScalar(qint(k) * qint(k + 1), square).reduced(),
        RationalScalar(qint(m + k + 2) * qint(m - k), square).reduced(),
    )


@FormulaRegistry.register
def circle_removal_ratio(kind: int, n: int, k: int) -> RationalScalar:
    """Return the factor removing a single circle beside a clasped corner of color n and k."""
    if min(n, k) < 0:
        raise A2Error(f"Circle removal needs n, k >= 0, got ({n}, {k}).")
    if kind == 1:
        return RationalScalar(qint(k + n + 3), qint(k + n + 1)).reduced()
    if kind == 2:
        return RationalScalar(delta_closure(n + 1, k), delta_closure(n, k)).reduced()
    raise A2Error(f"Circle removal kind must be 1 or 2, got {kind}.")
