"""Exact arithmetic in the fraction field of Laurent polynomials over Q.

The deformation parameter q is kept symbolic throughout: a LaurentPoly is a
finite map {exponent: Fraction} with no zero coefficients stored, and an
ExactScalar is a reduced fraction num/den of Laurent polynomials.  Because q
is generic (not a root of unity), every nonzero quantum integer is invertible
and the fraction field is an honest field.

Canonical form of an ExactScalar: the denominator is an ordinary polynomial
(lowest exponent 0) with constant coefficient 1, and num/den share no
polynomial factor.  Equality is then plain data comparison.

The same classes serve as the coefficient field Q(t) for the PDE module; only
the rendered variable name differs.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

_FR0 = Fraction(0)
_FR1 = Fraction(1)


class LaurentPoly:
    """Sparse Laurent polynomial sum_e c_e * q^e with Fraction coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: dict[int, Fraction] | None = None):
        # Callers must not mutate the dict afterwards; zero values are dropped.
        if coeffs:
            self.c = {e: v for e, v in coeffs.items() if v}
        else:
            self.c = {}

    @staticmethod
    def monomial(coeff, exp: int = 0) -> "LaurentPoly":
        v = Fraction(coeff)
        return LaurentPoly({exp: v}) if v else LaurentPoly()

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.c == other.c

    __hash__ = None  # mutable payload; not intended as a dict key

    def min_exp(self) -> int:
        return min(self.c)

    def max_exp(self) -> int:
        return max(self.c)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        if k == 0 or not self.c:
            return self
        return LaurentPoly({e + k: v for e, v in self.c.items()})

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -v for e, v in self.c.items()})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.c:
            return other
        if not other.c:
            return self
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, _FR0) + v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        r = LaurentPoly()
        r.c = out
        return r

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not other.c:
            return self
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, _FR0) - v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        r = LaurentPoly()
        r.c = out
        return r

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.c or not other.c:
            return LaurentPoly()
        a, b = self.c, other.c
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, Fraction] = {}
        for ea, va in a.items():
            for eb, vb in b.items():
                e = ea + eb
                w = out.get(e, _FR0) + va * vb
                if w:
                    out[e] = w
                else:
                    out.pop(e, None)
        r = LaurentPoly()
        r.c = out
        return r

    def scale(self, k: Fraction) -> "LaurentPoly":
        if not k:
            return LaurentPoly()
        return LaurentPoly({e: v * k for e, v in self.c.items()})

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative power of a LaurentPoly; use ExactScalar")
        r = LP_ONE
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def subs_inverse_q(self) -> "LaurentPoly":
        """The image under q -> q^{-1}."""
        return LaurentPoly({-e: v for e, v in self.c.items()})

    def __repr__(self) -> str:
        return f"LaurentPoly({render_poly(self)})"


LP_ZERO = LaurentPoly()
LP_ONE = LaurentPoly.monomial(1)


# -- ordinary-polynomial helpers (min exponent 0, integer coefficients) -------

def _to_int_primitive(p: LaurentPoly) -> dict[int, int]:
    """Shift to min exponent 0 and scale to a primitive integer polynomial."""
    m = p.min_exp()
    den_lcm = 1
    for v in p.c.values():
        den_lcm = den_lcm * v.denominator // math.gcd(den_lcm, v.denominator)
    out = {e - m: int(v * den_lcm) for e, v in p.c.items()}
    g = 0
    for v in out.values():
        g = math.gcd(g, v)
    if g > 1:
        out = {e: v // g for e, v in out.items()}
    if out[max(out)] < 0:
        out = {e: -v for e, v in out.items()}
    return out


def _int_poly_pseudo_rem(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    """Pseudo-remainder of integer polynomials (dense-free, dict based)."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        # lb * r - lr * x^(dr-db) * b
        new: dict[int, int] = {}
        for e, v in r.items():
            new[e] = v * lb
        for e, v in b.items():
            ee = e + dr - db
            new[ee] = new.get(ee, 0) - v * lr
        r = {e: v for e, v in new.items() if v}
        # keep the remainder primitive to control coefficient growth
        g = 0
        for v in r.values():
            g = math.gcd(g, v)
        if g > 1:
            r = {e: v // g for e, v in r.items()}
    return r


def _int_poly_gcd(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    while b:
        a, b = b, _int_poly_pseudo_rem(a, b)
    if a[max(a)] < 0:
        a = {e: -v for e, v in a.items()}
    return a


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Primitive gcd of the ordinary-polynomial parts (units of q dropped)."""
    if a.is_zero():
        return b if b.is_zero() else _from_int(_to_int_primitive(b))
    if b.is_zero():
        return _from_int(_to_int_primitive(a))
    g = _int_poly_gcd(_to_int_primitive(a), _to_int_primitive(b))
    return _from_int(g)


def _from_int(p: dict[int, int]) -> LaurentPoly:
    return LaurentPoly({e: Fraction(v) for e, v in p.items()})


def poly_divmod(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder after shifting both to ordinary polynomials.

    The unit q^k separating the Laurent parts is carried on the quotient, so
    a == q*b + r holds exactly as Laurent polynomials whenever r == 0.
    """
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero():
        return LP_ZERO, LP_ZERO
    ma, mb = a.min_exp(), b.min_exp()
    ra = {e - ma: v for e, v in a.c.items()}
    rb = {e - mb: v for e, v in b.c.items()}
    db = max(rb)
    lb = rb[db]
    quo: dict[int, Fraction] = {}
    while ra and max(ra) >= db:
        da = max(ra)
        f = ra[da] / lb
        quo[da - db] = f
        for e, v in rb.items():
            ee = e + da - db
            w = ra.get(ee, _FR0) - f * v
            if w:
                ra[ee] = w
            else:
                ra.pop(ee, None)
    q = LaurentPoly({e + ma - mb: v for e, v in quo.items()})
    r = LaurentPoly({e + ma: v for e, v in ra.items()})
    return q, r


def poly_exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    q, r = poly_divmod(a, b)
    if not r.is_zero():
        raise ValueError("inexact polynomial division")
    return q


class ExactScalar:
    """Element of the fraction field Q(q), kept in reduced canonical form."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = LP_ONE, *, _reduced: bool = False):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if _reduced:
            self.num = num
            self.den = den
            return
        self.num, self.den = _reduce(num, den)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_int(k) -> "ExactScalar":
        return ExactScalar(LaurentPoly.monomial(Fraction(k)), LP_ONE, _reduced=True)

    @staticmethod
    def q_power(e: int, coeff=1) -> "ExactScalar":
        return ExactScalar(LaurentPoly.monomial(Fraction(coeff), e), LP_ONE,
                           _reduced=True) if coeff else S_ZERO

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = ExactScalar.from_int(other)
        return (isinstance(other, ExactScalar)
                and self.num == other.num and self.den == other.den)

    __hash__ = None

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.num, self.den, _reduced=True)

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return ExactScalar(self.num + other.num, self.den)
        return ExactScalar(self.num * other.den + other.num * self.den,
                           self.den * other.den)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return ExactScalar(self.num - other.num, self.den)
        return ExactScalar(self.num * other.den - other.num * self.den,
                           self.den * other.den)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        if self.num.is_zero() or other.num.is_zero():
            return S_ZERO
        if self.den == LP_ONE and other.den == LP_ONE:
            return ExactScalar(self.num * other.num, LP_ONE, _reduced=True)
        return ExactScalar(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "ExactScalar") -> "ExactScalar":
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero ExactScalar")
        return ExactScalar(self.num * other.den, self.den * other.num)

    def inverse(self) -> "ExactScalar":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return ExactScalar(self.den, self.num)

    def __pow__(self, n: int) -> "ExactScalar":
        if n < 0:
            return self.inverse() ** (-n)
        r = S_ONE
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __repr__(self) -> str:
        return f"ExactScalar({render_scalar(self)})"


def _reduce(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return LP_ZERO, LP_ONE
    # pull the unit q^k out of the denominator
    md = den.min_exp()
    mn = num.min_exp()
    n = num.shift(-mn)
    d = den.shift(-md)
    offset = mn - md
    if len(d.c) == 1:
        # monomial denominator: absorb entirely
        c = d.c[0]
        return n.scale(1 / c).shift(offset), LP_ONE
    g = poly_gcd(n, d)
    if len(g.c) > 1 or g.c.get(0) != _FR1:
        n = poly_exact_div(n, g)
        d = poly_exact_div(d, g)
    c = d.c[d.min_exp()]
    if c != _FR1:
        n = n.scale(1 / c)
        d = d.scale(1 / c)
    return n.shift(offset), d


S_ZERO = ExactScalar(LP_ZERO, LP_ONE, _reduced=True)
S_ONE = ExactScalar(LP_ONE, LP_ONE, _reduced=True)


# -- the q-integer layer ------------------------------------------------------

_qint_cache: dict[int, ExactScalar] = {}
_qfact_cache: dict[int, ExactScalar] = {}


def qint(m: int) -> ExactScalar:
    """[m] = (q^m - q^{-m})/(q - q^{-1}) = q^{m-1} + q^{m-3} + ... + q^{1-m}."""
    r = _qint_cache.get(m)
    if r is None:
        if m == 0:
            r = S_ZERO
        elif m < 0:
            r = -qint(-m)
        else:
            r = ExactScalar(LaurentPoly({e: _FR1 for e in range(1 - m, m, 2)}),
                            LP_ONE, _reduced=True)
        _qint_cache[m] = r
    return r


def qfact(n: int) -> ExactScalar:
    """[n]! = [1][2]...[n], with [0]! = 1."""
    if n < 0:
        raise ValueError(f"q-factorial of negative integer {n}")
    r = _qfact_cache.get(n)
    if r is None:
        r = S_ONE if n == 0 else qfact(n - 1) * qint(n)
        _qfact_cache[n] = r
    return r


def qbin(n: int, k: int) -> ExactScalar:
    """The q-binomial [n]!/([k]![n-k]!); always a Laurent polynomial."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"q-binomial out of range: n={n}, k={k}")
    return qfact(n) / (qfact(k) * qfact(n - k))


# -- rendering and parsing ----------------------------------------------------
#
# A polynomial renders as a ' + '-joined list of signed monomials "c*q^e"
# sorted by exponent, and a scalar as "num / den".  The only spaces appear
# around the top-level '/' and the '+' separators, so parsing is a split.

def render_poly(p: LaurentPoly, var: str = "q") -> str:
    if p.is_zero():
        return "0"
    terms = [f"{p.c[e]}*{var}^{e}" for e in sorted(p.c)]
    return " + ".join(terms)


def render_scalar(x: ExactScalar, var: str = "q") -> str:
    return f"{render_poly(x.num, var)} / {render_poly(x.den, var)}"


_MONOMIAL_RE = re.compile(r"^(-?\d+(?:/\d+)?)\*([A-Za-z]+)\^(-?\d+)$")


def parse_poly(s: str, var: str = "q") -> LaurentPoly:
    s = s.strip()
    if s == "0":
        return LP_ZERO
    coeffs: dict[int, Fraction] = {}
    for term in s.split(" + "):
        m = _MONOMIAL_RE.match(term.strip())
        if not m or m.group(2) != var:
            raise ValueError(f"cannot parse monomial {term!r}")
        coeffs[int(m.group(3))] = Fraction(m.group(1))
    return LaurentPoly(coeffs)


def parse_scalar(s: str, var: str = "q") -> ExactScalar:
    num_s, sep, den_s = s.partition(" / ")
    if not sep:
        raise ValueError(f"scalar string {s!r} lacks ' / ' separator")
    return ExactScalar(parse_poly(num_s, var), parse_poly(den_s, var))
