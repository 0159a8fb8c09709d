"""Exact coefficient arithmetic.

Everything downstream works over the rationals: Gaussian rationals, truncated
Laurent series in one formal variable, and Laurent polynomials in a formal
half-integer power q^(1/2).  No floats anywhere; truncation orders are tracked
through every operation so a result never claims more precision than its
inputs supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Union

Rational = Fraction

ScalarLike = Union[int, Fraction, "GaussRational"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class GaussRational:
    """A Gaussian rational re + im*i with exact rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(x: ScalarLike) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        return GaussRational(_frac(x), Fraction(0))

    @staticmethod
    def i_power(m: int) -> "GaussRational":
        """i**m for any integer m (negative allowed)."""
        return _I_POWERS[m % 4]

    def __add__(self, other: ScalarLike) -> "GaussRational":
        o = GaussRational.of(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other: ScalarLike) -> "GaussRational":
        return self + (-GaussRational.of(other))

    def __rsub__(self, other: ScalarLike) -> "GaussRational":
        return GaussRational.of(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "GaussRational":
        o = GaussRational.of(other)
        return GaussRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GaussRational":
        o = GaussRational.of(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussRational")
        return self * GaussRational(o.re / n, -o.im / n)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}*i)"


GR_ZERO = GaussRational(Fraction(0), Fraction(0))
GR_ONE = GaussRational(Fraction(1), Fraction(0))
GR_I = GaussRational(Fraction(0), Fraction(1))
_I_POWERS = (GR_ONE, GR_I, -GR_ONE, -GR_I)


class LaurentSeries:
    """Truncated Laurent series with GaussRational coefficients.

    ``low`` is the exponent of the first stored coefficient, ``order`` the
    largest exponent about which anything is known.  Coefficients between the
    last stored one and ``order`` are exactly zero; beyond ``order`` they are
    unknown.  The zero series stores no coefficients at all.
    """

    __slots__ = ("low", "coeffs", "order")

    def __init__(self, low: int, coeffs: Iterable[ScalarLike], order: int):
        cs = [GaussRational.of(c) for c in coeffs]
        # canonical form: strip leading and trailing zeros
        while cs and cs[0].is_zero():
            cs.pop(0)
            low += 1
        while cs and cs[-1].is_zero():
            cs.pop()
        if cs and low + len(cs) - 1 > order:
            raise ValueError("coefficients extend past the truncation order")
        if not cs:
            low = 0
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", order)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("LaurentSeries is immutable")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(order: int) -> "LaurentSeries":
        return LaurentSeries(0, (), order)

    @staticmethod
    def one(order: int) -> "LaurentSeries":
        return LaurentSeries(0, (GR_ONE,), order)

    @staticmethod
    def monomial(coeff: ScalarLike, exponent: int, order: int) -> "LaurentSeries":
        return LaurentSeries(exponent, (GaussRational.of(coeff),), order)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, exponent: int) -> GaussRational:
        """Coefficient of the given exponent; raises past the known order."""
        if exponent > self.order:
            raise ValueError(f"exponent {exponent} beyond truncation order {self.order}")
        i = exponent - self.low
        if not self.coeffs or i < 0 or i >= len(self.coeffs):
            return GR_ZERO
        return self.coeffs[i]

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def max_known(self) -> int:
        return self.order

    def _eff_low(self) -> int:
        # lowest exponent for precision bookkeeping; the zero series behaves
        # as if supported arbitrarily high, capped at its own order
        return self.low if self.coeffs else self.order

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        order = min(self.order, other.order)
        if self.is_zero():
            return other.truncate(order)
        if other.is_zero():
            return self.truncate(order)
        low = min(self.low, other.low)
        n = order - low + 1
        cs = [GR_ZERO] * n
        for s in (self, other):
            for j, c in enumerate(s.coeffs):
                k = s.low + j - low
                if 0 <= k < n:
                    cs[k] = cs[k] + c
        return LaurentSeries(low, cs, order)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.low, tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        order = min(self.order + other._eff_low(), other.order + self._eff_low())
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(order)
        low = self.low + other.low
        n = order - low + 1
        if n <= 0:
            return LaurentSeries.zero(order)
        cs = [GR_ZERO] * n
        for ia, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for ib, b in enumerate(other.coeffs):
                k = ia + ib
                if k >= n:
                    break
                cs[k] = cs[k] + a * b
        return LaurentSeries(low, cs, order)

    def scale(self, c: ScalarLike) -> "LaurentSeries":
        c = GaussRational.of(c)
        if c.is_zero():
            return LaurentSeries.zero(self.order)
        return LaurentSeries(self.low, tuple(c * a for a in self.coeffs), self.order)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by the k-th power of the variable."""
        return LaurentSeries(self.low + k, self.coeffs, self.order + k)

    def inverse(self) -> "LaurentSeries":
        """Multiplicative inverse.  Precision drops by twice the valuation."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero series")
        v = self.low
        lead = self.coeffs[0]
        norder = self.order - 2 * v
        m = self.order - v  # usable tail length
        # invert 1 + t where t has positive valuation, by iteration
        inv = [GR_ONE] + [GR_ZERO] * m
        for k in range(1, m + 1):
            acc = GR_ZERO
            for j in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc = acc + (self.coeffs[j] / lead) * inv[k - j]
            inv[k] = -acc
        return LaurentSeries(-v, [c / lead for c in inv], norder)

    def __truediv__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self * other.inverse()

    def pow(self, n: int) -> "LaurentSeries":
        if n < 0:
            return self.inverse().pow(-n)
        result = LaurentSeries.one(self.order + max(0, (n - 1)) * self._eff_low())
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, order: int) -> "LaurentSeries":
        if order >= self.order:
            if order > self.order:
                raise ValueError("cannot extend a truncated series")
            return self
        keep = [c for j, c in enumerate(self.coeffs) if self.low + j <= order]
        return LaurentSeries(self.low, keep, order)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.low == other.low
            and self.coeffs == other.coeffs
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.low, self.coeffs, self.order))

    def agrees(self, other: "LaurentSeries", through: int | None = None) -> bool:
        """Coefficientwise equality on the jointly known exponent range."""
        top = min(self.order, other.order)
        if through is not None:
            top = min(top, through)
        lo = min(self._eff_low(), other._eff_low())
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, top + 1))

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O(x^{self.order + 1})"
        parts = []
        for j, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            e = self.low + j
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"{c}*x")
            else:
                parts.append(f"{c}*x^{e}")
        return " + ".join(parts) + f" + O(x^{self.order + 1})"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        coeffs = []
        for c in self.coeffs:
            if c.is_real():
                coeffs.append([c.re.numerator, c.re.denominator])
            else:
                coeffs.append([[c.re.numerator, c.re.denominator],
                               [c.im.numerator, c.im.denominator]])
        return {"lowest_exponent": self.low, "coefficients": coeffs,
                "truncation_order": self.order}

    @staticmethod
    def from_json(d: dict) -> "LaurentSeries":
        cs = [_coeff_from_json(c) for c in d["coefficients"]]
        return LaurentSeries(d["lowest_exponent"], cs, d["truncation_order"])


def _coeff_from_json(c) -> GaussRational:
    if len(c) == 2 and isinstance(c[0], list):
        return GaussRational(Fraction(c[0][0], c[0][1]), Fraction(c[1][0], c[1][1]))
    return GaussRational(Fraction(c[0], c[1]), Fraction(0))


class QHalfLaurent:
    """Sparse Laurent polynomial in q^(1/2); exponents stored in half units.

    A term (h, c) means c * q^(h/2).  At most one term per half exponent and
    coefficients are never zero.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[int, ScalarLike]]):
        acc: dict[int, GaussRational] = {}
        for h, c in terms:
            c = GaussRational.of(c)
            if h in acc:
                c = acc[h] + c
            acc[h] = c
        object.__setattr__(
            self, "terms",
            tuple(sorted((h, c) for h, c in acc.items() if not c.is_zero()))
        )

    def __setattr__(self, *a):
        raise AttributeError("QHalfLaurent is immutable")

    @staticmethod
    def zero() -> "QHalfLaurent":
        return QHalfLaurent(())

    @staticmethod
    def one() -> "QHalfLaurent":
        return QHalfLaurent(((0, GR_ONE),))

    @staticmethod
    def monomial(coeff: ScalarLike, half_exponent: int) -> "QHalfLaurent":
        return QHalfLaurent(((half_exponent, coeff),))

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, half_exponent: int) -> GaussRational:
        for h, c in self.terms:
            if h == half_exponent:
                return c
        return GR_ZERO

    def __add__(self, other: "QHalfLaurent") -> "QHalfLaurent":
        return QHalfLaurent(self.terms + other.terms)

    def __neg__(self) -> "QHalfLaurent":
        return QHalfLaurent(tuple((h, -c) for h, c in self.terms))

    def __sub__(self, other: "QHalfLaurent") -> "QHalfLaurent":
        return self + (-other)

    def __mul__(self, other: "QHalfLaurent") -> "QHalfLaurent":
        out = []
        for h1, c1 in self.terms:
            for h2, c2 in other.terms:
                out.append((h1 + h2, c1 * c2))
        return QHalfLaurent(out)

    def scale(self, c: ScalarLike) -> "QHalfLaurent":
        c = GaussRational.of(c)
        if c.is_zero():
            return QHalfLaurent.zero()
        return QHalfLaurent(tuple((h, c * a) for h, a in self.terms))

    def pow(self, n: int) -> "QHalfLaurent":
        if n < 0:
            raise ValueError("negative powers of q-polynomials are not defined")
        r = QHalfLaurent.one()
        b = self
        while n:
            if n & 1:
                r = r * b
            n >>= 1
            if n:
                b = b * b
        return r

    def __eq__(self, other) -> bool:
        if not isinstance(other, QHalfLaurent):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for h, c in self.terms:
            if h == 0:
                bits.append(f"{c}")
            elif h % 2 == 0:
                bits.append(f"{c}*q^{h // 2}")
            else:
                bits.append(f"{c}*q^({h}/2)")
        return " + ".join(bits)

    def to_json(self) -> list:
        out = []
        for h, c in self.terms:
            if c.is_real():
                out.append([h, [c.re.numerator, c.re.denominator]])
            else:
                out.append([h, [[c.re.numerator, c.re.denominator],
                                [c.im.numerator, c.im.denominator]]])
        return out

    @staticmethod
    def from_json(data: list) -> "QHalfLaurent":
        return QHalfLaurent((h, _coeff_from_json(c)) for h, c in data)


# -- closed forms ----------------------------------------------------------


def two_sin_half(n: int, order: int) -> LaurentSeries:
    """2*sin(n*x/2) as a truncated series; the basic trivalent-vertex bracket."""
    if n <= 0:
        raise ValueError("n must be a positive integer")
    half = Fraction(n, 2)
    cs = {}
    e = 1
    while e <= order:
        j = (e - 1) // 2
        cs[e] = 2 * (-1) ** j * half ** e / factorial(e)
        e += 2
    lo = min(cs) if cs else 0
    coeffs = [cs.get(k, Fraction(0)) for k in range(lo, order + 1)] if cs else []
    return LaurentSeries(lo, coeffs, order)


def normalized_sin_half(n: int, order: int) -> LaurentSeries:
    """2*sin(n*x/2)/n; leading coefficient 1 for every n."""
    return two_sin_half(n, order).scale(Fraction(1, n))


def quantum_integer_q(n: int) -> QHalfLaurent:
    """i^-(n+1) q^(n/2) + i^(n+1) q^(-n/2), the q-side of the vertex bracket."""
    if n <= 0:
        raise ValueError("n must be a positive integer")
    return QHalfLaurent((
        (n, GaussRational.i_power(-(n + 1))),
        (-n, GaussRational.i_power(n + 1)),
    ))


def q_to_lambda(p: QHalfLaurent, order: int) -> tuple[LaurentSeries, bool]:
    """Substitute q^(1/2) = i*exp(i*x/2) into a q-polynomial.

    Returns the resulting series truncated at ``order`` together with a flag
    telling whether every imaginary part cancelled.  An imaginary residue is
    reported, never raised: callers decide whether it is an error.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    total = LaurentSeries.zero(order)
    for h, c in p.terms:
        # c * q^(h/2) = c * i^h * exp(i*h*x/2)
        pref = c * GaussRational.i_power(h)
        arg = GaussRational(Fraction(0), Fraction(h, 2))  # i*h/2
        cs = []
        term = GR_ONE
        for j in range(order + 1):
            cs.append(pref * term)
            term = term * arg / (j + 1)
        total = total + LaurentSeries(0, cs, order)
    return total, total.is_real()
