"""Symbolic verification of the Benoit-Saint-Aubin PDE system.

All computations happen over the exact field Q(t) with t = 1/kappa: the Kac
weights h_{1,d} = (d^2-1) t - (d-1)/2, the operator coefficients (-4/kappa)^k
= (-4t)^k and the exponents 2 s_i s_j t of the closed-form solutions are all
polynomial in t, and kappa/2 = 1/(2t) stays rational.

The function class is a rational prefactor times the fixed power product

    P(x_1, ..., x_p) * prod_{i<j} (x_j - x_i)^(a_ij + b_ij t),

closed under differentiation: derivatives fold 1/(x_j - x_i) factors into
the prefactor, whose denominator therefore always stays a monomial in the
differences x_j - x_i.  Zero testing is exact (a prefactor is zero iff its
numerator polynomial is), so "this operator annihilates that function" is a
theorem-grade statement, valid for every kappa > 0 at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .qfield import ExactScalar, LaurentPoly, S_ONE, S_ZERO, render_scalar

# Q(t) scalars reuse the Laurent fraction field; only the display var differs.
KappaScalar = ExactScalar

T = ExactScalar.q_power(1)          # the variable t = 1/kappa
KAPPA = T.inverse()                 # kappa itself, as a rational function of t


def kappa_const(x) -> KappaScalar:
    return ExactScalar(LaurentPoly.monomial(Fraction(x)))


def kac_weight(d: int) -> KappaScalar:
    """h_{1,d} = (d-1)(2(d+1) - kappa)/(2 kappa) = (d^2-1) t - (d-1)/2."""
    return ExactScalar(LaurentPoly({1: Fraction(d * d - 1), 0: Fraction(-(d - 1), 2)}))


def delta_weight(d: int, d_list) -> KappaScalar:
    """The conformal homogeneity degree h_{1,d} - sum_i h_{1,d_i}."""
    out = kac_weight(d)
    for di in d_list:
        out = out - kac_weight(di)
    return out


@dataclass(frozen=True)
class Exponent:
    """An exponent a + b*t attached to one difference (x_j - x_i)."""
    a: Fraction
    b: Fraction

    @staticmethod
    def of(a, b) -> "Exponent":
        return Exponent(Fraction(a), Fraction(b))

    def scalar(self) -> KappaScalar:
        return ExactScalar(LaurentPoly({0: self.a, 1: self.b}))

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def __str__(self) -> str:
        return f"{self.a} + {self.b}/kappa"


EXP_ZERO = Exponent(Fraction(0), Fraction(0))


# -- multivariate polynomials over Q(t) -----------------------------------------

class MultiPoly:
    """Polynomial in x_1..x_p with KappaScalar coefficients, as a sparse map
    from exponent tuples."""

    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs: dict[tuple[int, ...], KappaScalar] | None = None):
        self.p = p
        self.c = {e: v for e, v in (coeffs or {}).items() if v}

    @staticmethod
    def const(p: int, v: KappaScalar) -> "MultiPoly":
        return MultiPoly(p, {(0,) * p: v})

    @staticmethod
    def x(p: int, i: int) -> "MultiPoly":
        e = [0] * p
        e[i - 1] = 1
        return MultiPoly(p, {tuple(e): S_ONE})

    @staticmethod
    def diff_factor(p: int, a: int, b: int) -> "MultiPoly":
        """x_b - x_a for a < b."""
        ea, eb = [0] * p, [0] * p
        ea[a - 1] = 1
        eb[b - 1] = 1
        return MultiPoly(p, {tuple(eb): S_ONE, tuple(ea): -S_ONE})

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiPoly) and self.p == other.p and self.c == other.c

    __hash__ = None

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e)
            w = v if w is None else w + v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        return MultiPoly(self.p, out)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + other.scale(-S_ONE)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        out: dict[tuple[int, ...], KappaScalar] = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                w = out.get(e)
                c = v1 * v2
                w = c if w is None else w + c
                if w:
                    out[e] = w
                else:
                    out.pop(e, None)
        return MultiPoly(self.p, out)

    def scale(self, k: KappaScalar) -> "MultiPoly":
        if not k:
            return MultiPoly(self.p)
        return MultiPoly(self.p, {e: v * k for e, v in self.c.items()})

    def diff(self, i: int) -> "MultiPoly":
        out = {}
        for e, v in self.c.items():
            k = e[i - 1]
            if k:
                ne = e[:i - 1] + (k - 1,) + e[i:]
                w = out.get(ne)
                c = v * kappa_const(k)
                out[ne] = c if w is None else w + c
        return MultiPoly(self.p, {e: v for e, v in out.items() if v})

    def subs_equal(self, b: int, a: int) -> "MultiPoly":
        """Substitute x_b := x_a (used for divisibility tests)."""
        out: dict[tuple[int, ...], KappaScalar] = {}
        for e, v in self.c.items():
            ne = list(e)
            ne[a - 1] += ne[b - 1]
            ne[b - 1] = 0
            ne = tuple(ne)
            w = out.get(ne)
            w = v if w is None else w + v
            if w:
                out[ne] = w
            else:
                out.pop(ne, None)
        return MultiPoly(self.p, out)

    def div_diff(self, a: int, b: int) -> "MultiPoly | None":
        """Exact quotient by (x_b - x_a), or None if not divisible."""
        if self.subs_equal(b, a):
            return None
        # synthetic division in the variable x_b
        quo: dict[tuple[int, ...], KappaScalar] = {}
        rem = dict(self.c)
        while rem:
            e = max(rem, key=lambda t: (t[b - 1], t))
            v = rem.pop(e)
            if e[b - 1] == 0:
                raise AssertionError("division left a remainder despite zero test")
            ne = e[:b - 1] + (e[b - 1] - 1,) + e[b:]
            w = quo.get(ne)
            w = v if w is None else w + v
            if w:
                quo[ne] = w
            else:
                quo.pop(ne, None)
            # self = quo*(x_b - x_a) + rem  =>  push v*x_a term back into rem
            ea = ne[:a - 1] + (ne[a - 1] + 1,) + ne[a:]
            w = rem.get(ea)
            w = v if w is None else w + v
            if w:
                rem[ea] = w
            else:
                rem.pop(ea, None)
        return MultiPoly(self.p, quo)


# -- prefactors: polynomial / monomial-in-differences ----------------------------

@dataclass(frozen=True)
class Prefactor:
    """num / prod (x_b - x_a)^pow, normalized by cancelling difference factors."""
    num: MultiPoly
    den: tuple[tuple[tuple[int, int], int], ...]   # ((a,b), power), sorted

    @staticmethod
    def of(num: MultiPoly, den: dict[tuple[int, int], int] | None = None) -> "Prefactor":
        den = {k: v for k, v in (den or {}).items() if v}
        if any(v < 0 for v in den.values()):
            raise ValueError("negative denominator power")
        if num.is_zero():
            return Prefactor(num, ())
        # cancel difference factors dividing the numerator
        changed = True
        while changed and den:
            changed = False
            for (a, b), k in list(den.items()):
                q = num.div_diff(a, b)
                if q is not None:
                    num = q
                    if k == 1:
                        del den[(a, b)]
                    else:
                        den[(a, b)] = k - 1
                    changed = True
        return Prefactor(num, tuple(sorted(den.items())))

    @staticmethod
    def one(p: int) -> "Prefactor":
        return Prefactor(MultiPoly.const(p, S_ONE), ())

    @property
    def p(self) -> int:
        return self.num.p

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_poly(self) -> MultiPoly:
        d = MultiPoly.const(self.p, S_ONE)
        for (a, b), k in self.den:
            f = MultiPoly.diff_factor(self.p, a, b)
            for _ in range(k):
                d = d * f
        return d

    def __add__(self, other: "Prefactor") -> "Prefactor":
        dself = dict(self.den)
        dother = dict(other.den)
        union = {k: max(dself.get(k, 0), dother.get(k, 0)) for k in {*dself, *dother}}
        def lift(pf: "Prefactor", have: dict) -> MultiPoly:
            num = pf.num
            for key, k in union.items():
                extra = k - have.get(key, 0)
                if extra:
                    f = MultiPoly.diff_factor(pf.p, *key)
                    for _ in range(extra):
                        num = num * f
            return num
        return Prefactor.of(lift(self, dself) + lift(other, dother), union)

    def __sub__(self, other: "Prefactor") -> "Prefactor":
        return self + other.scale(-S_ONE)

    def __mul__(self, other: "Prefactor") -> "Prefactor":
        den = dict(self.den)
        for key, k in other.den:
            den[key] = den.get(key, 0) + k
        return Prefactor.of(self.num * other.num, den)

    def scale(self, k: KappaScalar) -> "Prefactor":
        if not k:
            return Prefactor(MultiPoly(self.p), ())
        return Prefactor(self.num.scale(k), self.den)

    def mul_diff_power(self, a: int, b: int, k: int) -> "Prefactor":
        """Multiply by (x_b - x_a)^k for any integer k."""
        if k == 0:
            return self
        if self.is_zero():
            return self
        den = dict(self.den)
        if k < 0:
            den[(a, b)] = den.get((a, b), 0) - k
            return Prefactor.of(self.num, den)
        num = self.num
        f = MultiPoly.diff_factor(self.p, a, b)
        for _ in range(k):
            num = num * f
        return Prefactor.of(num, den)

    def diff(self, i: int) -> "Prefactor":
        """d/dx_i using the quotient rule on the difference monomial."""
        out = Prefactor.of(self.num.diff(i), dict(self.den))
        for (a, b), k in self.den:
            if i == a or i == b:
                sign = -1 if i == b else 1   # d/dx_i (x_b - x_a)^{-k}
                den = dict(self.den)
                den[(a, b)] = k + 1
                out = out + Prefactor.of(self.num.scale(kappa_const(sign * k)), den)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Prefactor):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den_poly() == other.num * self.den_poly()

    __hash__ = None


# -- the differentiation-closed expression class ---------------------------------

@dataclass(frozen=True)
class CoulombExpr:
    """prefactor * prod_{i<j} (x_j - x_i)^(exponents[i,j])."""
    p: int
    exponents: tuple[tuple[tuple[int, int], Exponent], ...]   # full upper triangle
    prefactor: Prefactor

    @staticmethod
    def of(p: int, exponents: dict[tuple[int, int], Exponent] | None = None,
           prefactor: Prefactor | None = None) -> "CoulombExpr":
        exps = exponents or {}
        full = tuple(((i, j), exps.get((i, j), EXP_ZERO))
                     for i in range(1, p + 1) for j in range(i + 1, p + 1))
        return CoulombExpr(p, full, prefactor if prefactor is not None else Prefactor.one(p))

    @staticmethod
    def const(p: int, v) -> "CoulombExpr":
        k = v if isinstance(v, ExactScalar) else kappa_const(v)
        return CoulombExpr.of(p, {}, Prefactor.one(p).scale(k))

    def same_class(self, other: "CoulombExpr") -> bool:
        return self.p == other.p and self.exponents == other.exponents

    def is_zero(self) -> bool:
        return self.prefactor.is_zero()

    def __add__(self, other: "CoulombExpr") -> "CoulombExpr":
        if not self.same_class(other):
            raise ValueError("cannot add expressions with different exponent data")
        return CoulombExpr(self.p, self.exponents, self.prefactor + other.prefactor)

    def __sub__(self, other: "CoulombExpr") -> "CoulombExpr":
        if not self.same_class(other):
            raise ValueError("cannot subtract expressions with different exponent data")
        return CoulombExpr(self.p, self.exponents, self.prefactor - other.prefactor)

    def scale(self, k: KappaScalar) -> "CoulombExpr":
        return CoulombExpr(self.p, self.exponents, self.prefactor.scale(k))

    def mul_prefactor(self, f: Prefactor) -> "CoulombExpr":
        return CoulombExpr(self.p, self.exponents, self.prefactor * f)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoulombExpr):
            return NotImplemented
        if self.is_zero() and other.is_zero() and self.p == other.p:
            return True
        return self.same_class(other) and self.prefactor == other.prefactor

    __hash__ = None

    def render(self) -> str:
        lines = [f"e({i},{j}) = {e}" for (i, j), e in self.exponents if not e.is_zero()]
        num_terms = len(self.prefactor.num.c)
        return "; ".join(lines) + f"; prefactor with {num_terms} terms"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "exponents": [{"i": i, "j": j, "a": str(e.a), "b": str(e.b)}
                          for (i, j), e in self.exponents if not e.is_zero()],
            "prefactor": {
                "num": [{"monomial": list(m), "value": render_scalar(v, "t")}
                        for m, v in sorted(self.prefactor.num.c.items())],
                "den": [{"pair": [a, b], "power": k}
                        for (a, b), k in self.prefactor.den],
            },
        }


def diff_x(expr: CoulombExpr, i: int) -> CoulombExpr:
    """Exact partial derivative; the exponent matrix is untouched.

    d_i of the power product contributes sum over pairs (a,b) containing i of
    +-e_ab/(x_b - x_a), folded into the prefactor."""
    if not 1 <= i <= expr.p:
        raise ValueError(f"variable index {i} out of range")
    pref = expr.prefactor.diff(i)
    for (a, b), e in expr.exponents:
        if e.is_zero() or (i != a and i != b):
            continue
        sign = 1 if i == b else -1
        extra = expr.prefactor.scale(e.scalar() * kappa_const(sign))
        pref = pref + extra.mul_diff_power(a, b, -1)
    return CoulombExpr(expr.p, expr.exponents, pref)


def mul_x_power(expr: CoulombExpr, i: int, k: int = 1) -> CoulombExpr:
    """Multiply by x_i^k (a polynomial prefactor operation)."""
    xi = MultiPoly.x(expr.p, i)
    f = MultiPoly.const(expr.p, S_ONE)
    for _ in range(k):
        f = f * xi
    return expr.mul_prefactor(Prefactor.of(f))


def apply_L(m: int, j: int, expr: CoulombExpr, weights) -> CoulombExpr:
    """The first-order operator
    L_m^{(j)} = -sum_{i != j} [ (x_i - x_j)^{1+m} d_i + (1+m) h_i (x_i - x_j)^m ].

    `weights` lists the conformal weight attached to every point."""
    p = expr.p
    out = CoulombExpr(p, expr.exponents, Prefactor(MultiPoly(p), ()))
    for i in range(1, p + 1):
        if i == j:
            continue
        a, b = min(i, j), max(i, j)
        sign = 1 if i == b else -1      # (x_i - x_j) = sign * (x_b - x_a)
        pref = diff_x(expr, i).prefactor.mul_diff_power(a, b, 1 + m)
        if sign == -1 and (1 + m) % 2:
            pref = pref.scale(-S_ONE)
        out = CoulombExpr(p, expr.exponents, out.prefactor - pref)
        c = weights[i - 1] * kappa_const(1 + m)
        if c:
            pref = expr.prefactor.scale(c).mul_diff_power(a, b, m)
            if sign == -1 and m % 2:
                pref = pref.scale(-S_ONE)
            out = CoulombExpr(p, expr.exponents, out.prefactor - pref)
    return out


def apply_bsa(j: int, d_j: int, expr: CoulombExpr, weights) -> CoulombExpr:
    """The order-d_j Benoit-Saint-Aubin operator at point j: the composition
    sum over (n_1, ..., n_k) with n_1+...+n_k = d_j of

        (-4/kappa)^{d_j - k} (d_j - 1)!^2
        / prod_r (n_1+...+n_r)(n_{r+1}+...+n_k)  *  L_{-n_1} ... L_{-n_k}.
    """
    if d_j < 1:
        raise ValueError("BSA order must be at least 1")
    p = expr.p
    out = CoulombExpr(p, expr.exponents, Prefactor(MultiPoly(p), ()))
    minus4t = ExactScalar(LaurentPoly.monomial(Fraction(-4), 1))
    fact2 = Fraction(math.factorial(d_j - 1)) ** 2
    for comp in _compositions(d_j):
        k = len(comp)
        denom = Fraction(1)
        for r in range(1, k):
            denom *= sum(comp[:r]) * sum(comp[r:])
        coeff = (minus4t ** (d_j - k)) * kappa_const(fact2 / denom)
        term = expr
        for n in reversed(comp):
            term = apply_L(-n, j, term, weights)
        out = out + term.scale(coeff)
    return out


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def apply_sle2(i: int, expr: CoulombExpr) -> CoulombExpr:
    """The second-order multiple-SLE operator at point i, with weight h_{1,2}
    at every point:
    (kappa/2) d_i^2 + sum_{j != i} [ 2/(x_j - x_i) d_j - 2 h_{1,2}/(x_j-x_i)^2 ].
    """
    p = expr.p
    h = kac_weight(2)
    out = diff_x(diff_x(expr, i), i).scale(KAPPA / kappa_const(2))
    for j in range(1, p + 1):
        if j == i:
            continue
        a, b = min(i, j), max(i, j)
        sign = 1 if j == b else -1      # (x_j - x_i) = sign * (x_b - x_a)
        pref = diff_x(expr, j).prefactor.mul_diff_power(a, b, -1).scale(
            kappa_const(2 * sign))
        out = CoulombExpr(p, expr.exponents, out.prefactor + pref)
        pref = expr.prefactor.mul_diff_power(a, b, -2).scale(h * kappa_const(-2))
        out = CoulombExpr(p, expr.exponents, out.prefactor + pref)
    return out


def shuffle_solution(partition) -> CoulombExpr:
    """The closed-form all-defect solution prod_{i<j} (x_j - x_i)^{2 s_i s_j t}
    (overall constants dropped: every check here is a linear statement)."""
    parts = tuple(partition)
    if any(r < 1 for r in parts):
        raise ValueError("partition parts must be positive")
    p = len(parts)
    exps = {(i, j): Exponent.of(0, 2 * parts[i - 1] * parts[j - 1])
            for i in range(1, p + 1) for j in range(i + 1, p + 1)}
    return CoulombExpr.of(p, exps)


def check_translation(expr: CoulombExpr) -> bool:
    """sum_i d_i expr == 0."""
    out = None
    for i in range(1, expr.p + 1):
        d = diff_x(expr, i)
        out = d if out is None else out + d
    return out.is_zero() if out is not None else True


def check_homogeneity(expr: CoulombExpr, degree: KappaScalar) -> bool:
    """sum_i x_i d_i expr == degree * expr."""
    out = None
    for i in range(1, expr.p + 1):
        t = mul_x_power(diff_x(expr, i), i)
        out = t if out is None else out + t
    if out is None:
        return not degree
    return out == expr.scale(degree)


def check_mobius(expr: CoulombExpr, weights) -> bool:
    """Infinitesimal special-conformal covariance:
    sum_i (x_i^2 d_i + 2 h_i x_i) expr == 0.

    Together with translation invariance and homogeneity this is the
    generator form of full Mobius covariance for smooth families."""
    out = None
    for i in range(1, expr.p + 1):
        t = mul_x_power(diff_x(expr, i), i, 2)
        t = t + mul_x_power(expr.scale(weights[i - 1] * kappa_const(2)), i)
        out = t if out is None else out + t
    return out.is_zero() if out is not None else True


def selberg_constant(d1: int, d2: int, delta: int, kappa: float) -> float:
    """Numeric evaluation of the Gamma-product asymptotics constant
    B^{d1,d2}_delta; raises on a Gamma pole along the parameter line."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    m2 = d1 + d2 - 1 - delta
    if m2 < 0 or m2 % 2:
        raise ValueError(f"delta={delta} out of range for ({d1},{d2})")
    m = m2 // 2
    four = 4.0 / kappa
    out = 1.0 / math.factorial(m)
    for u in range(1, m + 1):
        out *= _gamma(1 - four * (d1 - u)) * _gamma(1 - four * (d2 - u)) \
            * _gamma(1 + four * u)
        out /= _gamma(1 + four) * _gamma(2 - four * (d1 + d2 - m - u))
    return out


def _gamma(x: float) -> float:
    if x <= 0 and float(x).is_integer():
        raise ValueError(f"Gamma pole at {x}")
    try:
        return math.gamma(x)
    except ValueError as exc:
        raise ValueError(f"Gamma pole at {x}") from exc
