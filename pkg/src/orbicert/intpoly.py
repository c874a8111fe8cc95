"""Polynomials with exact coefficients, lowest degree first.

Provides what the reduction pipeline needs: minimal polynomials of exact
matrices, the cyclotomic factors of an integer polynomial, splitting off the
(t-1)-part, and the scaled Bezout identity at t = 1.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

from .errors import ValidationError
from .linalg import QQ, ExactMatrix, RationalField, Subspace, solve


def _norm_coeffs(coeffs):
    out = []
    for c in coeffs:
        if isinstance(c, int):
            out.append(Fraction(c))
        elif isinstance(c, Fraction):
            out.append(c)
        else:
            raise TypeError(f"bad coefficient type {type(c).__name__}")
    while out and not out[-1]:
        out.pop()
    return tuple(out)


@dataclasses.dataclass(frozen=True)
class Poly:
    """Univariate polynomial over Q, coefficients lowest degree first."""

    coeffs: tuple[Fraction, ...]

    @classmethod
    def of(cls, *coeffs):
        return cls(_norm_coeffs(coeffs))

    @classmethod
    def from_list(cls, coeffs):
        return cls(_norm_coeffs(coeffs))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls):
        return cls((Fraction(1),))

    @classmethod
    def t(cls):
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def leading(self):
        return self.coeffs[-1]

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else None
        if acc is None:
            raise TypeError("use eval_at_endo for matrix arguments")
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return Poly(_norm_coeffs([x + y for x, y in zip(a, b)]))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(_norm_coeffs([c * other for c in self.coeffs]))
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return Poly(_norm_coeffs(out))

    __rmul__ = __mul__

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        div = other.coeffs
        q = [Fraction(0)] * max(len(rem) - len(div) + 1, 0)
        lead = div[-1]
        for i in range(len(rem) - len(div), -1, -1):
            c = rem[i + len(div) - 1] / lead
            if c:
                q[i] = c
                for j, d in enumerate(div):
                    rem[i + j] -= c * d
        return Poly(_norm_coeffs(q)), Poly(_norm_coeffs(rem))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValidationError("polynomial division is not exact")
        return q

    def pow(self, n):
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def content(self):
        """gcd of numerators over lcm of denominators, for integral use."""
        if self.is_zero():
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def compose_linear(self, shift):
        """Substitute t -> t + shift."""
        acc = Poly.zero()
        lin = Poly.of(shift, 1)
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly.of(c)
        return acc

    def to_int_coeffs(self):
        if not self.is_integral():
            raise ValidationError("polynomial is not integral")
        return tuple(int(c) for c in self.coeffs)


def _flatten_to_rational(mat):
    """Matrix over an order's fraction field -> block rational matrix."""
    if isinstance(mat, ExactMatrix):
        if isinstance(mat.field, RationalField):
            return [[Fraction(x) for x in r] for r in mat.rows]
        ring = mat.field
        d = ring.degree
        n = mat.nrows
        out = [[Fraction(0)] * (n * d) for _ in range(n * d)]
        for i in range(n):
            for j in range(n):
                block = ring.mul_matrix(mat.rows[i][j])
                for a in range(d):
                    for b in range(d):
                        out[i * d + a][j * d + b] = block[a][b]
        return out
    return [[Fraction(x) for x in row] for row in mat]


def minimal_polynomial(mat):
    """Monic minimal polynomial of a square exact matrix.

    Integral input gives integral output; this is asserted.
    """
    rows = _flatten_to_rational(mat)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValidationError("minimal polynomial needs a square matrix")
    integral = all(x.denominator == 1 for r in rows for x in r)
    dim = n * n

    def flat(m):
        return tuple(x for row in m for x in row)

    def mul(a, b):
        return [
            [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]

    ident = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    powers = [ident]
    seen = Subspace.zero(QQ, dim)
    while True:
        vec = flat(powers[-1])
        new = seen.add(Subspace.span(QQ, dim, [vec]))
        if new.dim == seen.dim:
            break
        seen = new
        powers.append(mul(powers[-1], rows))
    # the last power is dependent on the earlier ones; solve for coefficients
    deg = len(powers) - 1
    cols = [flat(p) for p in powers[:deg]]
    target = flat(powers[deg])
    mat_cols = ExactMatrix.from_rows(QQ, list(zip(*cols)))
    sol = solve(mat_cols, target)
    assert sol is not None
    coeffs = [-c for c in sol] + [Fraction(1)]
    poly = Poly(_norm_coeffs(coeffs))
    assert poly.is_monic()
    if integral:
        assert poly.is_integral()
    return poly


_CYCLOTOMIC_CACHE = {}


def cyclotomic(m):
    """The m-th cyclotomic polynomial, via the divisor recurrence."""
    if m < 1:
        raise ValidationError("cyclotomic index must be positive")
    if m in _CYCLOTOMIC_CACHE:
        return _CYCLOTOMIC_CACHE[m]
    num = Poly.from_list([-1] + [0] * (m - 1) + [1])
    for d in range(1, m):
        if m % d == 0:
            num = num.exact_div(cyclotomic(d))
    _CYCLOTOMIC_CACHE[m] = num
    return num


def euler_phi(m):
    out = m
    p = 2
    mm = m
    while p * p <= mm:
        if mm % p == 0:
            out -= out // p
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        out -= out // mm
    return out


def cyclotomic_divisors(f):
    """Sorted m with cyclotomic(m) dividing f.  deg constraint: phi(m) <= deg f."""
    if f.is_zero():
        raise ValidationError("zero polynomial")
    d = f.degree
    if d == 0:
        return []
    out = []
    bound = max(2 * d * d, 6)
    for m in range(1, bound + 1):
        if euler_phi(m) > d:
            continue
        if (f % cyclotomic(m)).is_zero():
            out.append(m)
    return out


def split_at_one(f):
    """Write f = f1 * (t-1)^r with f1(1) != 0; returns (f1, r)."""
    if f.is_zero():
        raise ValidationError("zero polynomial")
    tm1 = Poly.of(-1, 1)
    r = 0
    while f(1) == 0:
        f = f.exact_div(tm1)
        r += 1
    return f, r


def bezout_at_one(f1, r):
    """Scaled Bezout data (g1, g2, k): f1*g1 + (t-1)^r*g2 = k, integral, k > 0.

    Preconditions: r >= 1 and f1(1) != 0.  k divides f1(1)^r.
    """
    if r < 1:
        raise ValidationError("bezout_at_one needs r >= 1")
    c = f1(1)
    if c == 0:
        raise ValidationError("f1 must not vanish at 1")
    if not f1.is_integral():
        raise ValidationError("f1 must be integral")
    # invert h(s) = f1(1+s) as a power series mod s^r, scaled to clear
    # denominators: u_j has denominator dividing c^(j+1)
    h = f1.compose_linear(1).coeffs
    u = [Fraction(1) / c]
    for j in range(1, r):
        acc = Fraction(0)
        for i in range(j):
            hj = h[j - i] if j - i < len(h) else Fraction(0)
            acc += hj * u[i]
        u.append(-acc / c)
    k = c ** r
    g1_shifted = Poly.from_list([ui * k for ui in u])
    g1 = g1_shifted.compose_linear(-1)
    tm1r = Poly.of(-1, 1).pow(r)
    num = Poly.of(k) - f1 * g1
    g2 = num.exact_div(tm1r)
    # normalize: strip common integer content, make k positive
    kq = Fraction(k)
    divisor = math.gcd(
        kq.numerator,
        math.gcd(g1.content().numerator, g2.content().numerator),
    )
    if divisor > 1:
        g1 = g1 * Fraction(1, divisor)
        g2 = g2 * Fraction(1, divisor)
        kq = kq / divisor
    if kq < 0:
        g1, g2, kq = -g1, -g2, -kq
    k_out = int(kq)
    assert g1.is_integral() and g2.is_integral()
    assert (f1 * g1 + tm1r * g2) == Poly.of(k_out)
    assert abs(int(c)) ** r % k_out == 0
    return g1, g2, k_out


def eval_at_endo(f, mat: ExactMatrix):
    """f(mat) for a square ExactMatrix via Horner."""
    n = mat.nrows
    field = mat.field
    acc = ExactMatrix.zeros(field, n, n)
    for c in reversed(f.coeffs):
        acc = acc @ mat + ExactMatrix.scalar(field, n, field.from_int(1) * c)
    return acc
