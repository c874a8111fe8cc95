"""Orders in number fields, given by integer structure constants.

A ring is described by a basis b_0..b_{d-1} (b_0 = 1), a multiplication
table b_i*b_j = sum_l T[i][j][l] b_l over the integers, and, for each basis
element, an integer matrix giving its action on the first homology lattice
of the elliptic-curve factor it acts on.  Elements of the fraction field
carry rational coordinates; integrality is a property, not a type.
"""

from __future__ import annotations

import dataclasses
import itertools
from fractions import Fraction

from .errors import DimensionMismatch, ValidationError


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclasses.dataclass(frozen=True)
class RingSpec:
    """An order R inside a number field F, acting on a rank-2d lattice."""

    basis_names: tuple[str, ...]
    mul_table: tuple[tuple[tuple[int, ...], ...], ...]
    lattice_rep: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def degree(self):
        return len(self.basis_names)

    @property
    def lattice_rank(self):
        return len(self.lattice_rep[0])

    @property
    def factor_dim(self):
        return self.lattice_rank // 2

    @classmethod
    def create(cls, basis_names, mul_table, lattice_rep):
        names = tuple(basis_names)
        table = tuple(
            tuple(tuple(int(c) for c in cell) for cell in row) for row in mul_table
        )
        rep = tuple(
            tuple(tuple(int(c) for c in row) for row in mat) for mat in lattice_rep
        )
        ring = cls(names, table, rep)
        ring.validate()
        return ring

    def validate(self):
        d = self.degree
        if d == 0:
            raise ValidationError("ring needs at least the unit basis element")
        if len(self.mul_table) != d or any(
            len(row) != d or any(len(cell) != d for cell in row)
            for row in self.mul_table
        ):
            raise DimensionMismatch("mul_table must be degree^3")
        if len(self.lattice_rep) != d:
            raise DimensionMismatch("one lattice matrix per basis element")
        n = self.lattice_rank
        if n % 2 != 0:
            raise ValidationError("lattice rank must be even")
        for mat in self.lattice_rep:
            if len(mat) != n or any(len(row) != n for row in mat):
                raise DimensionMismatch("lattice matrices must be square of equal size")
        # b_0 must be the unit, both in the table and in the representation
        for j in range(d):
            if self.mul_table[0][j] != tuple(
                1 if l == j else 0 for l in range(d)
            ) or self.mul_table[j][0] != tuple(1 if l == j else 0 for l in range(d)):
                raise ValidationError("basis element 0 must act as the unit")
        ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        if self.lattice_rep[0] != ident:
            raise ValidationError("lattice representation of 1 must be the identity")
        # commutativity and associativity of the table
        for i, j in itertools.product(range(d), repeat=2):
            if self.mul_table[i][j] != self.mul_table[j][i]:
                raise ValidationError(f"mul_table not commutative at ({i},{j})")
        for i, j, k in itertools.product(range(d), repeat=3):
            left = self._mul_coords(self._basis_coords(i, j), self._unit_coords(k))
            right = self._mul_coords(self._unit_coords(i), self._basis_coords(j, k))
            if left != right:
                raise ValidationError(f"mul_table not associative at ({i},{j},{k})")
        # the lattice representation must be a ring homomorphism
        for i, j in itertools.product(range(d), repeat=2):
            prod = _int_mat_mul(self.lattice_rep[i], self.lattice_rep[j])
            expect = _int_mat_zero(n)
            for l, c in enumerate(self.mul_table[i][j]):
                expect = _int_mat_add(expect, _int_mat_scale(self.lattice_rep[l], c))
            if prod != expect:
                raise ValidationError(f"lattice_rep breaks multiplicativity at ({i},{j})")

    def _unit_coords(self, i):
        return tuple(Fraction(1 if l == i else 0) for l in range(self.degree))

    def _basis_coords(self, i, j):
        return tuple(Fraction(c) for c in self.mul_table[i][j])

    def _mul_coords(self, a, b):
        d = self.degree
        out = [Fraction(0)] * d
        for i in range(d):
            if not a[i]:
                continue
            for j in range(d):
                if not b[j]:
                    continue
                coeff = a[i] * b[j]
                for l, c in enumerate(self.mul_table[i][j]):
                    if c:
                        out[l] += coeff * c
        return tuple(out)

    def element(self, coords):
        coords = tuple(_as_fraction(c) for c in coords)
        if len(coords) != self.degree:
            raise DimensionMismatch("coordinate length != ring degree")
        return FieldElement(self, coords)

    def zero(self):
        return self.element([0] * self.degree)

    def one(self):
        return self.from_int(1)

    def from_int(self, k):
        return self.from_rational(Fraction(k))

    def from_rational(self, q):
        coords = [_as_fraction(q)] + [Fraction(0)] * (self.degree - 1)
        return self.element(coords)

    def basis_element(self, i):
        return self.element([1 if l == i else 0 for l in range(self.degree)])

    def inv(self, x):
        return x.inverse()

    def mul_matrix(self, a):
        """Matrix of y -> a*y on coordinates (columns indexed by basis)."""
        d = self.degree
        cols = [self._mul_coords(a.coords, self._unit_coords(j)) for j in range(d)]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def lattice_matrix(self, a):
        """Action of a on the homology lattice, as rational entries."""
        n = self.lattice_rank
        out = [[Fraction(0)] * n for _ in range(n)]
        for l, c in enumerate(a.coords):
            if not c:
                continue
            mat = self.lattice_rep[l]
            for i in range(n):
                row = mat[i]
                for j in range(n):
                    if row[j]:
                        out[i][j] += c * row[j]
        return out


@dataclasses.dataclass(frozen=True)
class FieldElement:
    """Element of Frac(R) in coordinates over the order's basis."""

    ring: RingSpec
    coords: tuple[Fraction, ...]

    def _check(self, other):
        if self.ring is not other.ring and self.ring != other.ring:
            raise ValidationError("elements belong to different rings")

    def __bool__(self):
        return any(self.coords)

    def __add__(self, other):
        self._check(other)
        return FieldElement(
            self.ring, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        self._check(other)
        return FieldElement(
            self.ring, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        return FieldElement(self.ring, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            self._check(other)
            return FieldElement(
                self.ring, self.ring._mul_coords(self.coords, other.coords)
            )
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            return FieldElement(self.ring, tuple(a * q for a in self.coords))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            return FieldElement(self.ring, tuple(a / q for a in self.coords))
        return NotImplemented

    def inverse(self):
        """Solve a*x = 1 via the regular representation."""
        if not self:
            raise ZeroDivisionError("inverse of zero field element")
        d = self.ring.degree
        aug = [row[:] + [Fraction(1 if i == 0 else 0)] for i, row in
               enumerate(self.ring.mul_matrix(self))]
        # little Gaussian elimination; degrees are tiny
        rank = 0
        pivots = []
        for col in range(d):
            piv = next((r for r in range(rank, d) if aug[r][col]), None)
            if piv is None:
                continue
            aug[rank], aug[piv] = aug[piv], aug[rank]
            inv = 1 / aug[rank][col]
            aug[rank] = [e * inv for e in aug[rank]]
            for r in range(d):
                if r != rank and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [e - f * p for e, p in zip(aug[r], aug[rank])]
            pivots.append(col)
            rank += 1
        if rank < d:
            # a is a zero divisor: the "order" was not a domain
            raise ZeroDivisionError("element is a zero divisor; ring is not an order")
        sol = [Fraction(0)] * d
        for r, col in enumerate(pivots):
            sol[col] = aug[r][d]
        return FieldElement(self.ring, tuple(sol))

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coords)


def _int_mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _int_mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _int_mat_scale(a, c):
    return tuple(tuple(c * x for x in row) for row in a)


def _int_mat_zero(n):
    return tuple(tuple(0 for _ in range(n)) for _ in range(n))


def integer_ring(factor_dim=1):
    """Z acting on a factor of dimension factor_dim (rank-2d lattice)."""
    n = 2 * factor_dim
    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return RingSpec.create(("1",), (((1,),),), (ident,))


def gaussian_ring():
    """Z[i] acting on an elliptic curve with complex multiplication by i."""
    table = (
        ((1, 0), (0, 1)),
        ((0, 1), (-1, 0)),
    )
    rep_one = ((1, 0), (0, 1))
    rep_i = ((0, -1), (1, 0))
    return RingSpec.create(("1", "i"), table, (rep_one, rep_i))


def quadratic_ring(d):
    """Z[sqrt(d)] for squarefree d < 0 acting on an elliptic curve.

    The lattice representation sends sqrt(d) to [[0, d], [1, 0]].
    """
    table = (
        ((1, 0), (0, 1)),
        ((0, 1), (d, 0)),
    )
    rep_one = ((1, 0), (0, 1))
    rep_s = ((0, d), (1, 0))
    return RingSpec.create(("1", "s"), table, (rep_one, rep_s))
