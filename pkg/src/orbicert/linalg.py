"""Exact linear algebra over Q or over the fraction field of a declared order.

Subspaces are stored with a canonical basis: the reduced row echelon form of
any spanning set, unit pivots chosen left to right.  Two subspaces are equal
iff their canonical bases are equal, so dataclass equality is semantic
equality.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction

from .errors import DimensionMismatch, ValidationError


class RationalField:
    """Field adapter for plain Fraction arithmetic."""

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, k):
        return Fraction(k)

    def inv(self, x):
        return 1 / x

    def __repr__(self):
        return "QQ"


QQ = RationalField()


def _rref(vectors, ambient, field):
    """Reduced row echelon form; returns (rows, pivots)."""
    mat = [list(v) for v in vectors if any(v)]
    for v in mat:
        if len(v) != ambient:
            raise DimensionMismatch("vector length != ambient dimension")
    rank = 0
    pivots = []
    for col in range(ambient):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = field.inv(mat[rank][col])
        mat[rank] = [e * inv for e in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [e - f * p for e, p in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(mat):
            break
    return tuple(tuple(r) for r in mat[:rank]), tuple(pivots)


@dataclasses.dataclass(frozen=True)
class ExactMatrix:
    """Dense matrix with entries in a declared exact field."""

    field: object
    rows: tuple[tuple[object, ...], ...]

    @classmethod
    def from_rows(cls, field, rows):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise DimensionMismatch("ragged matrix rows")
        return cls(field, rows)

    @classmethod
    def identity(cls, field, n):
        one, zero = field.one(), field.zero()
        return cls(
            field,
            tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)),
        )

    @classmethod
    def zeros(cls, field, nrows, ncols):
        zero = field.zero()
        return cls(field, tuple(tuple(zero for _ in range(ncols)) for _ in range(nrows)))

    @classmethod
    def scalar(cls, field, n, value):
        zero = field.zero()
        return cls(
            field,
            tuple(tuple(value if i == j else zero for j in range(n)) for i in range(n)),
        )

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __add__(self, other):
        return ExactMatrix(
            self.field,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def __sub__(self, other):
        return ExactMatrix(
            self.field,
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def __neg__(self):
        return ExactMatrix(self.field, tuple(tuple(-a for a in r) for r in self.rows))

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise DimensionMismatch("matrix product shape mismatch")
        bt = tuple(zip(*other.rows)) if other.rows else ()
        out = []
        for row in self.rows:
            out.append(
                tuple(
                    sum((a * b for a, b in zip(row, col) if a and b),
                        start=self.field.zero())
                    for col in bt
                )
            )
        return ExactMatrix(self.field, tuple(out))

    def scale(self, c):
        return ExactMatrix(self.field, tuple(tuple(c * a for a in r) for r in self.rows))

    def pow(self, n):
        if self.nrows != self.ncols:
            raise DimensionMismatch("power of non-square matrix")
        if n < 0:
            return self.inverse().pow(-n)
        result = ExactMatrix.identity(self.field, self.nrows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, vec):
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length != ncols")
        return tuple(
            sum((a * x for a, x in zip(row, vec) if a and x), start=self.field.zero())
            for row in self.rows
        )

    def transpose(self):
        return ExactMatrix(self.field, tuple(zip(*self.rows)) if self.rows else ())

    def columns(self):
        return [tuple(row[j] for row in self.rows) for j in range(self.ncols)]

    def is_zero(self):
        return all(not a for row in self.rows for a in row)

    def det(self):
        if self.nrows != self.ncols:
            raise DimensionMismatch("determinant of non-square matrix")
        n = self.nrows
        mat = [list(r) for r in self.rows]
        det = self.field.one()
        for col in range(n):
            piv = next((r for r in range(col, n) if mat[r][col]), None)
            if piv is None:
                return self.field.zero()
            if piv != col:
                mat[col], mat[piv] = mat[piv], mat[col]
                det = -det
            det = det * mat[col][col]
            inv = self.field.inv(mat[col][col])
            for r in range(col + 1, n):
                if mat[r][col]:
                    f = mat[r][col] * inv
                    mat[r] = [e - f * p for e, p in zip(mat[r], mat[col])]
        return det

    def inverse(self):
        if self.nrows != self.ncols:
            raise DimensionMismatch("inverse of non-square matrix")
        n = self.nrows
        one, zero = self.field.one(), self.field.zero()
        aug = [
            list(self.rows[i]) + [one if i == j else zero for j in range(n)]
            for i in range(n)
        ]
        rank = 0
        for col in range(n):
            piv = next((r for r in range(rank, n) if aug[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            aug[rank], aug[piv] = aug[piv], aug[rank]
            inv = self.field.inv(aug[rank][col])
            aug[rank] = [e * inv for e in aug[rank]]
            for r in range(n):
                if r != rank and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [e - f * p for e, p in zip(aug[r], aug[rank])]
            rank += 1
        return ExactMatrix(self.field, tuple(tuple(row[n:]) for row in aug))


@dataclasses.dataclass(frozen=True)
class Subspace:
    """Linear subspace of field^ambient in canonical echelon form."""

    field: object
    ambient: int
    rows: tuple[tuple[object, ...], ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, field, ambient, vectors):
        rows, pivots = _rref(vectors, ambient, field)
        return cls(field, ambient, rows, pivots)

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, ambient, (), ())

    @classmethod
    def full(cls, field, ambient):
        one, zero = field.one(), field.zero()
        rows = tuple(
            tuple(one if i == j else zero for j in range(ambient))
            for i in range(ambient)
        )
        return cls(field, ambient, rows, tuple(range(ambient)))

    @property
    def dim(self):
        return len(self.rows)

    def is_zero(self):
        return not self.rows

    def is_full(self):
        return self.dim == self.ambient

    def _reduce(self, vec):
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def contains(self, vec):
        if len(vec) != self.ambient:
            raise DimensionMismatch("vector length != ambient dimension")
        return not any(self._reduce(vec))

    def contains_subspace(self, other):
        return all(self.contains(r) for r in other.rows)

    def __le__(self, other):
        return other.contains_subspace(self)

    def coords_of(self, vec):
        """Coefficients of vec over the canonical basis; None if outside."""
        if not self.contains(vec):
            return None
        return tuple(vec[p] for p in self.pivots)

    def add(self, other):
        self._match(other)
        return Subspace.span(self.field, self.ambient, self.rows + other.rows)

    __or__ = add

    def intersect(self, other):
        self._match(other)
        if self.is_full():
            return other
        if other.is_full():
            return self
        # null space of [U^T | V^T] gives coefficient pairs with Uc = -Vd
        cols = [tuple(r) for r in self.rows] + [tuple(r) for r in other.rows]
        if not cols:
            return Subspace.zero(self.field, self.ambient)
        mat = ExactMatrix.from_rows(self.field, list(zip(*cols)))
        null = matrix_kernel(mat)
        vecs = []
        a = self.dim
        for coeffs in null.rows:
            v = [self.field.zero()] * self.ambient
            for c, row in zip(coeffs[:a], self.rows):
                if c:
                    v = [x + c * y for x, y in zip(v, row)]
            vecs.append(tuple(v))
        return Subspace.span(self.field, self.ambient, vecs)

    def image_under(self, mat: ExactMatrix):
        if mat.ncols != self.ambient:
            raise DimensionMismatch("matrix does not act on this ambient space")
        return Subspace.span(
            self.field, mat.nrows, [mat.apply(r) for r in self.rows]
        )

    def basis_matrix(self):
        """Matrix whose columns are the canonical basis vectors."""
        cols = [tuple(r) for r in self.rows]
        if not cols:
            return ExactMatrix.zeros(self.field, self.ambient, 0)
        return ExactMatrix.from_rows(self.field, list(zip(*cols)))

    def _match(self, other):
        if self.ambient != other.ambient:
            raise DimensionMismatch("subspaces of different ambient spaces")
        if self.field is not other.field and self.field != other.field:
            raise ValidationError("subspaces over different fields")


def canonical_basis(field, ambient, vectors):
    """Canonical echelon basis of the span of the given vectors."""
    return Subspace.span(field, ambient, vectors)


def matrix_image(mat: ExactMatrix):
    return Subspace.span(mat.field, mat.nrows, [tuple(c) for c in mat.columns()])


def matrix_kernel(mat: ExactMatrix):
    rows, pivots = _rref(mat.rows, mat.ncols, mat.field)
    pivset = set(pivots)
    free = [j for j in range(mat.ncols) if j not in pivset]
    basis = []
    one = mat.field.one()
    zero = mat.field.zero()
    for j in free:
        v = [zero] * mat.ncols
        v[j] = one
        for row, p in zip(rows, pivots):
            if row[j]:
                v[p] = -row[j]
        basis.append(tuple(v))
    return Subspace.span(mat.field, mat.ncols, basis)


def kernel_image(mat: ExactMatrix):
    """(kernel, image) of the matrix; rank-nullity is asserted."""
    ker = matrix_kernel(mat)
    img = matrix_image(mat)
    assert ker.dim + img.dim == mat.ncols
    return ker, img


def subspace_sum_intersect(u: Subspace, v: Subspace):
    """(U+V, U∩V) with the dimension identity asserted."""
    s = u.add(v)
    i = u.intersect(v)
    assert s.dim + i.dim == u.dim + v.dim
    return s, i


def solve(mat: ExactMatrix, target):
    """One solution x of mat @ x = target, or None."""
    if len(target) != mat.nrows:
        raise DimensionMismatch("target length != nrows")
    aug_rows = [tuple(row) + (t,) for row, t in zip(mat.rows, target)]
    rows, pivots = _rref(aug_rows, mat.ncols + 1, mat.field)
    if mat.ncols in pivots:
        return None
    sol = [mat.field.zero()] * mat.ncols
    for row, p in zip(rows, pivots):
        sol[p] = row[mat.ncols]
    return tuple(sol)


def restriction_matrix(mat: ExactMatrix, sub: Subspace):
    """Matrix of mat acting on sub, in sub's canonical basis coordinates.

    Raises ValidationError if sub is not invariant under mat.
    """
    cols = []
    for r in sub.rows:
        w = mat.apply(r)
        coords = sub.coords_of(w)
        if coords is None:
            raise ValidationError("subspace is not invariant under the matrix")
        cols.append(coords)
    if not cols:
        return ExactMatrix.zeros(mat.field, 0, 0)
    return ExactMatrix.from_rows(mat.field, list(zip(*cols)))


def projection_pair(b1: Subspace, b2: Subspace):
    """Projection matrices (P1, P2) for an internal direct sum b1 ⊕ b2.

    P1 + P2 = id, im P1 = b1, ker P1 = b2.  Raises ValidationError if the
    subspaces are not complementary.
    """
    n = b1.ambient
    field = b1.field
    cols = [tuple(r) for r in b1.rows] + [tuple(r) for r in b2.rows]
    if len(cols) != n:
        raise ValidationError("subspaces are not complementary")
    s = ExactMatrix.from_rows(field, list(zip(*cols)))
    try:
        sinv = s.inverse()
    except ZeroDivisionError:
        raise ValidationError("subspaces are not complementary") from None
    a = b1.dim
    zero, one = field.zero(), field.one()
    d1 = ExactMatrix.from_rows(
        field,
        [[one if (i == j and i < a) else zero for j in range(n)] for i in range(n)],
    )
    p1 = s @ d1 @ sinv
    p2 = ExactMatrix.identity(field, n) - p1
    return p1, p2
