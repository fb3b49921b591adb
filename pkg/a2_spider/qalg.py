"""Exact Laurent polynomials in q^(1/6) and the quantum scalars built from them."""

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from operator import mul
from typing import Union

import sympy as sp

from a2_spider.errors import A2Error, DivisionError, UndefinedDegreeError

SixthExp = int
Coefficient = Union[int, Fraction]

_Q6 = sp.Symbol("x")


class Scalar:
    """Finitely supported Laurent polynomial in q^(1/6) with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[SixthExp, Coefficient] | None = None) -> None:
        self._terms: dict[SixthExp, Fraction] = {
            int(exp): Fraction(coef) for exp, coef in (terms or {}).items() if coef != 0
        }
        self._hash: int | None = None

    @classmethod
    def zero(cls) -> "Scalar":
        """Return the additive identity."""
        return cls()

    @classmethod
    def one(cls) -> "Scalar":
        """Return the multiplicative identity."""
        return cls({0: 1})

    @classmethod
    def monomial(cls, sixths: SixthExp, coefficient: Coefficient = 1) -> "Scalar":
        """Return coefficient * q^(sixths/6)."""
        return cls({sixths: coefficient})

    @classmethod
    def q(cls, power: Coefficient = 1) -> "Scalar":
        """Return q raised to a rational power with denominator dividing 6."""
        sixths = Fraction(power) * 6
        if sixths.denominator != 1:
            raise A2Error(f"Exponent {power} is not a multiple of 1/6.")
        return cls.monomial(int(sixths))

    @classmethod
    def coerce(cls, value: "Scalar | Coefficient") -> "Scalar":
        """Promote a rational constant to a scalar."""
        if isinstance(value, Scalar):
            return value
        return cls({0: value})

    @property
    def terms(self) -> dict[SixthExp, Fraction]:
        """Return a copy of the exponent-to-coefficient map."""
        return dict(self._terms)

    def items(self) -> list[tuple[SixthExp, Fraction]]:
        """Return terms sorted by exponent."""
        return sorted(self._terms.items())

    def coefficient(self, sixths: SixthExp) -> Fraction:
        """Return the coefficient at exponent sixths/6."""
        return self._terms.get(sixths, Fraction(0))

    def is_zero(self) -> bool:
        """Return whether every coefficient vanishes."""
        return not self._terms

    def is_monomial(self) -> bool:
        """Return whether the scalar has exactly one term."""
        return len(self._terms) == 1

    @property
    def min_sixth(self) -> SixthExp:
        """Return the least exponent in sixths."""
        if not self._terms:
            raise UndefinedDegreeError("Minimum degree of zero is undefined.")
        return min(self._terms)

    @property
    def max_sixth(self) -> SixthExp:
        """Return the greatest exponent in sixths."""
        if not self._terms:
            raise UndefinedDegreeError("Maximum degree of zero is undefined.")
        return max(self._terms)

    def shift(self, sixths: SixthExp) -> "Scalar":
        """Multiply by q^(sixths/6)."""
        return Scalar({exp + sixths: coef for exp, coef in self._terms.items()})

    def truncate(self, below_sixth: SixthExp) -> "Scalar":
        """Drop every term with exponent at or above below_sixth/6."""
        return Scalar({exp: coef for exp, coef in self._terms.items() if exp < below_sixth})

    def is_integral(self) -> bool:
        """Return whether coefficients are integers and exponents are whole powers of q."""
        return all(
            coef.denominator == 1 and exp % 6 == 0 for exp, coef in self._terms.items()
        )

    def coefficients(self, count: int) -> list[int]:
        """Return integer coefficients of q^0 .. q^(count-1)."""
        values = []
        for power in range(count):
            coef = self.coefficient(6 * power)
            if coef.denominator != 1:
                raise A2Error(f"Coefficient of q^{power} is not an integer: {coef}.")
            values.append(int(coef))
        return values

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> "Scalar":
        return Scalar({exp: -coef for exp, coef in self._terms.items()})

    def __add__(self, other: "Scalar | Coefficient") -> "Scalar":
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        result = dict(self._terms)
        for exp, coef in Scalar.coerce(other)._terms.items():
            result[exp] = result.get(exp, 0) + coef
        return Scalar(result)

    __radd__ = __add__

    def __sub__(self, other: "Scalar | Coefficient") -> "Scalar":
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: "Scalar | Coefficient") -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: "Scalar | Coefficient") -> "Scalar":
        if isinstance(other, (int, Fraction)):
            return Scalar({exp: coef * other for exp, coef in self._terms.items()})
        if not isinstance(other, Scalar):
            return NotImplemented
        result: dict[SixthExp, Fraction] = {}
        for exp_a, coef_a in self._terms.items():
            for exp_b, coef_b in other._terms.items():
                exp = exp_a + exp_b
                result[exp] = result.get(exp, 0) + coef_a * coef_b
        return Scalar(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0:
            if not self.is_monomial():
                raise DivisionError("Only monomials have Laurent polynomial inverses.")
            (exp, coef), = self._terms.items()
            return Scalar({-exp * -exponent: Fraction(1) / coef**-exponent})
        result = Scalar.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __truediv__(self, other: "Scalar | Coefficient") -> "Scalar":
        return self.divide(Scalar.coerce(other))

    def divide(self, divisor: "Scalar") -> "Scalar":
        """Divide exactly, raising when the remainder is nonzero."""
        if divisor.is_zero():
            raise ZeroDivisionError("Division by the zero scalar.")
        if self.is_zero():
            return Scalar()
        if divisor.is_monomial():
            (exp, coef), = divisor._terms.items()
            return Scalar({e - exp: c / coef for e, c in self._terms.items()})
        offset = self.min_sixth - divisor.min_sixth
        remainder = self.shift(-self.min_sixth)._terms
        lead_exp = divisor.max_sixth - divisor.min_sixth
        divisor_terms = divisor.shift(-divisor.min_sixth)._terms
        lead_coef = divisor_terms[lead_exp]
        quotient: dict[SixthExp, Fraction] = {}
        while remainder:
            top = max(remainder)
            if top < lead_exp:
                raise DivisionError(f"{self} is not divisible by {divisor}.")
            factor = remainder[top] / lead_coef
            step = top - lead_exp
            quotient[step] = factor
            for exp, coef in divisor_terms.items():
                value = remainder.get(exp + step, 0) - factor * coef
                if value:
                    remainder[exp + step] = value
                else:
                    remainder.pop(exp + step, None)
        return Scalar(quotient).shift(offset)

    def to_sympy(self) -> sp.Expr:
        """Return a sympy expression in the symbol q."""
        q = sp.Symbol("q")
        return sp.Add(
            *(
                sp.Rational(coef.numerator, coef.denominator) * q ** sp.Rational(exp, 6)
                for exp, coef in self.items()
            )
        )

    def to_poly(self) -> tuple[sp.Poly, SixthExp]:
        """Return (polynomial in x = q^(1/6), exponent shift) with a nonnegative support."""
        base = self.min_sixth if self._terms else 0
        coefficients = {
            (exp - base,): sp.Rational(coef.numerator, coef.denominator)
            for exp, coef in self._terms.items()
        }
        return sp.Poly.from_dict(coefficients or {(0,): 0}, _Q6, domain="QQ"), base

    @classmethod
    def from_poly(cls, poly: sp.Poly, base: SixthExp = 0) -> "Scalar":
        """Build a scalar from a polynomial in x = q^(1/6) shifted by base sixths."""
        return cls(
            {
                monom[0] + base: Fraction(int(coef.p), int(coef.q))
                for monom, coef in poly.terms()
            }
        )

    def to_json(self) -> list[list[str | int]]:
        """Return [numerator, denominator, sixth-exponent] triples sorted by exponent."""
        return [[str(coef.numerator), str(coef.denominator), exp] for exp, coef in self.items()]

    @classmethod
    def from_json(cls, triples: Iterable[Sequence[str | int]]) -> "Scalar":
        """Read scalar triples written by to_json."""
        terms: dict[SixthExp, Fraction] = {}
        for triple in triples:
            if len(triple) != 3:
                raise A2Error(f"Scalar term must be a triple, got {list(triple)}.")
            numerator, denominator, exp = triple
            if int(exp) in terms:
                raise A2Error(f"Duplicate exponent {exp} in scalar terms.")
            terms[int(exp)] = Fraction(int(numerator), int(denominator))
        return cls(terms)

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for exp, coef in self.items():
            sign = "-" if coef < 0 else "+"
            magnitude = abs(coef)
            power = _format_power(exp)
            if not power:
                body = str(magnitude)
            elif magnitude == 1:
                body = power
            else:
                body = f"{magnitude}*{power}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else f"-{text[2:]}"


def _format_power(sixths: SixthExp) -> str:
    """Render q^(sixths/6) in a compact ascii form."""
    if sixths == 0:
        return ""
    power = Fraction(sixths, 6)
    if power == 1:
        return "q"
    if power.denominator == 1 and power > 0:
        return f"q^{power}"
    return f"q^({power})"


class RationalScalar:
    """Quotient of two scalars, reduced lazily with a polynomial gcd."""

    __slots__ = ("num", "den")

    def __init__(self, num: Scalar | Coefficient, den: Scalar | Coefficient = 1) -> None:
        self.num = Scalar.coerce(num)
        self.den = Scalar.coerce(den)
        if self.den.is_zero():
            raise ZeroDivisionError("Rational scalar with zero denominator.")

    @classmethod
    def coerce(cls, value: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        """Promote scalars and constants to rational scalars."""
        if isinstance(value, RationalScalar):
            return value
        return cls(value)

    def reduced(self) -> "RationalScalar":
        """Cancel the gcd of numerator and denominator and make the denominator monic."""
        if self.num.is_zero():
            return RationalScalar(0)
        if self.den.is_monomial():
            (exp, coef), = self.den.terms.items()
            return RationalScalar(self.num.shift(-exp) * (1 / coef))
        num_poly, num_base = self.num.to_poly()
        den_poly, den_base = self.den.to_poly()
        common = num_poly.gcd(den_poly)
        num = Scalar.from_poly(num_poly.exquo(common), num_base)
        den = Scalar.from_poly(den_poly.exquo(common), den_base)
        lead = den.coefficient(den.max_sixth)
        low = den.min_sixth
        return RationalScalar(num.shift(-low) * (1 / lead), den.shift(-low) * (1 / lead))

    def is_polynomial(self) -> bool:
        """Return whether the reduced denominator is a constant."""
        reduced = self.reduced()
        return reduced.den == Scalar.one()

    def to_scalar(self) -> Scalar:
        """Return the exact polynomial value, raising when it is a true fraction."""
        return self.num.divide(self.den)

    def is_zero(self) -> bool:
        """Return whether the numerator vanishes."""
        return self.num.is_zero()

    def mdeg(self) -> Fraction:
        """Return mdeg(numerator) - mdeg(denominator)."""
        return mdeg(self.num) - mdeg(self.den)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (Scalar, int, Fraction)):
            other = RationalScalar(other)
        if not isinstance(other, RationalScalar):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        reduced = self.reduced()
        return hash((reduced.num, reduced.den))

    def __neg__(self) -> "RationalScalar":
        return RationalScalar(-self.num, self.den)

    def __add__(self, other: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        other = RationalScalar.coerce(other)
        if self.den == other.den:
            return RationalScalar(self.num + other.num, self.den)
        return RationalScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        return self + (-RationalScalar.coerce(other))

    def __rsub__(self, other: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        return RationalScalar.coerce(other) - self

    def __mul__(self, other: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        other = RationalScalar.coerce(other)
        return RationalScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        other = RationalScalar.coerce(other)
        return RationalScalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: "RationalScalar | Scalar | Coefficient") -> "RationalScalar":
        return RationalScalar.coerce(other) / self

    def __pow__(self, exponent: int) -> "RationalScalar":
        if exponent < 0:
            return RationalScalar(self.den**-exponent, self.num**-exponent)
        return RationalScalar(self.num**exponent, self.den**exponent)

    def to_json(self) -> dict[str, list[list[str | int]]]:
        """Return the reduced numerator and denominator as scalar triples."""
        reduced = self.reduced()
        return {"num": reduced.num.to_json(), "den": reduced.den.to_json()}

    @classmethod
    def from_json(cls, document: Mapping[str, Iterable[Sequence[str | int]]]) -> "RationalScalar":
        """Read a quotient written by to_json."""
        return cls(Scalar.from_json(document["num"]), Scalar.from_json(document["den"]))

    def __repr__(self) -> str:
        return f"RationalScalar({self})"

    def __str__(self) -> str:
        reduced = self.reduced()
        if reduced.den == Scalar.one():
            return str(reduced.num)
        return f"({reduced.num}) / ({reduced.den})"


@dataclass(frozen=True, slots=True)
class NormalizedScalar:
    """Scalar split as sign * q^(shift/6) * unit with unit of minimum degree zero."""

    unit: Scalar
    shift: SixthExp
    sign: int

    def reconstruct(self) -> Scalar:
        """Return the scalar this normalization was taken from."""
        return self.unit.shift(self.shift) * self.sign

    def to_json(self) -> dict[str, object]:
        """Return a JSON-ready mapping."""
        return {"unit": self.unit.to_json(), "shift": self.shift, "sign": self.sign}

    @classmethod
    def from_json(cls, document: Mapping[str, object]) -> "NormalizedScalar":
        """Read a normalization written by to_json."""
        return cls(
            unit=Scalar.from_json(document["unit"]),  # type: ignore[arg-type]
            shift=int(document["shift"]),  # type: ignore[call-overload]
            sign=int(document["sign"]),  # type: ignore[call-overload]
        )


@lru_cache(maxsize=None)
def qint(n: int) -> Scalar:
    """Return the quantum integer [n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2))."""
    if n < 0:
        return -qint(-n)
    return Scalar({3 * (n - 1) - 6 * i: 1 for i in range(n)})


@lru_cache(maxsize=None)
def qfactorial(n: int) -> Scalar:
    """Return [n]! = [1][2]...[n]."""
    if n < 0:
        raise A2Error(f"Quantum factorial needs n >= 0, got {n}.")
    return reduce(mul, (qint(i) for i in range(1, n + 1)), Scalar.one())


@lru_cache(maxsize=None)
def qbinom(n: int, k: int) -> Scalar:
    """Return the quantum binomial [n]! / ([k]! [n-k]!)."""
    if n < 0:
        raise A2Error(f"Quantum binomial needs n >= 0, got {n}.")
    if k < 0 or k > n:
        return Scalar.zero()
    k = min(k, n - k)
    numerator = reduce(mul, (qint(n - i) for i in range(k)), Scalar.one())
    return numerator.divide(qfactorial(k))


@lru_cache(maxsize=None)
def qpochhammer(n: int) -> Scalar:
    """Return (q)_n = (1 - q)(1 - q^2)...(1 - q^n)."""
    if n < 0:
        raise A2Error(f"q-Pochhammer symbol needs n >= 0, got {n}.")
    return reduce(mul, (Scalar({0: 1, 6 * i: -1}) for i in range(1, n + 1)), Scalar.one())


def qbinom_poch(n: int, k: int) -> Scalar:
    """Return the Gaussian binomial (q)_n / ((q)_k (q)_(n-k))."""
    if k < 0 or k > n:
        return Scalar.zero()
    return qpochhammer(n).divide(qpochhammer(k) * qpochhammer(n - k))


def qmultinomial(n: int, parts: Sequence[int]) -> Scalar:
    """Return the Gaussian multinomial (q)_n / prod (q)_(part)."""
    if any(part < 0 for part in parts) or sum(parts) != n:
        raise A2Error(f"Parts {list(parts)} do not sum to {n}.")
    denominator = reduce(mul, (qpochhammer(part) for part in parts), Scalar.one())
    return qpochhammer(n).divide(denominator)


def mdeg(f: Scalar) -> Fraction:
    """Return the least exponent of q carrying a nonzero coefficient."""
    return Fraction(f.min_sixth, 6)


def normalize(f: Scalar) -> NormalizedScalar:
    """Divide out the lowest monomial so the unit starts with a positive constant."""
    if f.is_zero():
        raise UndefinedDegreeError("Cannot normalize the zero scalar.")
    shift = f.min_sixth
    sign = 1 if f.coefficient(shift) > 0 else -1
    return NormalizedScalar(unit=f.shift(-shift) * sign, shift=shift, sign=sign)


def equiv_mod(f: Scalar, g: Scalar, n: int) -> bool:
    """Return whether the normalizations of f and g agree below q^n."""
    difference = normalize(f).unit - normalize(g).unit
    return difference.is_zero() or mdeg(difference) >= n


def poly_from_coefficients(coefficients: Iterable[Coefficient]) -> Scalar:
    """Return sum c_i q^i for a coefficient list starting at q^0."""
    return Scalar({6 * power: coef for power, coef in enumerate(coefficients)})


def iter_terms(f: Scalar) -> Iterator[tuple[Fraction, Fraction]]:
    """Yield (exponent of q, coefficient) pairs in ascending order."""
    for exp, coef in f.items():
        yield Fraction(exp, 6), coef
