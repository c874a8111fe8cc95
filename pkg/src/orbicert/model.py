"""Lattice model of an abelian variety with declared endomorphism orders.

A variety is a product of isotypic factors C_i^{k_i}; each C_i carries an
order R_i acting on its rank-2d_i homology lattice.  Endomorphisms are
per-factor matrices over R_i, connected subgroups are per-factor subspaces
over Frac(R_i), and points are formal sums

    sum_j  coeff_j * p_j  +  (torsion of order m)

where each p_j is a declared generic point confined to a connected support
subgroup.  Everything is exact; rational coefficients appear only through
internal reductions, never in input data.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

from .errors import (
    DimensionMismatch,
    IncompatibleTorsion,
    UndeclaredGenerator,
    ValidationError,
)
from .linalg import ExactMatrix, Subspace
from .orders import FieldElement, RingSpec
from .smith import lattice_saturation, left_kernel_saturated


@dataclasses.dataclass(frozen=True)
class Factor:
    """One isotypic block C^k with End(C) = the declared order."""

    name: str
    ring: RingSpec
    multiplicity: int

    @property
    def lattice_rank(self):
        return self.multiplicity * self.ring.lattice_rank

    @property
    def variety_dim(self):
        return self.multiplicity * self.ring.factor_dim


@dataclasses.dataclass(frozen=True)
class AbelianVarietySpec:
    factors: tuple[Factor, ...]

    @classmethod
    def create(cls, factors):
        factors = tuple(factors)
        names = [f.name for f in factors]
        if len(set(names)) != len(names):
            raise ValidationError("factor names must be unique")
        for f in factors:
            if f.multiplicity < 0:
                raise ValidationError("factor multiplicity must be non-negative")
        return cls(factors)

    @property
    def g(self):
        return sum(f.variety_dim for f in self.factors)

    @property
    def lattice_rank(self):
        return 2 * self.g

    def index_of(self, name):
        for i, f in enumerate(self.factors):
            if f.name == name:
                return i
        raise ValidationError(f"unknown factor {name!r}")

    def lattice_offsets(self):
        out = []
        acc = 0
        for f in self.factors:
            out.append(acc)
            acc += f.lattice_rank
        return out

    def endo_identity(self):
        return EndoMatrix(
            self,
            tuple(
                ExactMatrix.identity(f.ring, f.multiplicity) for f in self.factors
            ),
        )

    def endo_zero(self):
        return EndoMatrix(
            self,
            tuple(
                ExactMatrix.zeros(f.ring, f.multiplicity, f.multiplicity)
                for f in self.factors
            ),
        )

    def endo_scalar(self, k):
        return EndoMatrix(
            self,
            tuple(
                ExactMatrix.scalar(f.ring, f.multiplicity, f.ring.from_int(k))
                for f in self.factors
            ),
        )

    def full_group(self):
        return ConnectedSubgroup(
            self,
            tuple(Subspace.full(f.ring, f.multiplicity) for f in self.factors),
        )

    def zero_group(self):
        return ConnectedSubgroup(
            self,
            tuple(Subspace.zero(f.ring, f.multiplicity) for f in self.factors),
        )


def _match_spec(a, b):
    if a.spec is not b.spec and a.spec != b.spec:
        raise ValidationError("objects belong to different variety specs")


@dataclasses.dataclass(frozen=True)
class EndoMatrix:
    """Element of End(A) ⊗ Q: one matrix block per isotypic factor."""

    spec: AbelianVarietySpec
    blocks: tuple[ExactMatrix, ...]

    @classmethod
    def from_blocks(cls, spec, blocks):
        blocks = tuple(blocks)
        if len(blocks) != len(spec.factors):
            raise DimensionMismatch("one block per factor required")
        for f, b in zip(spec.factors, blocks):
            if b.nrows != f.multiplicity or b.ncols != f.multiplicity:
                raise DimensionMismatch(f"block for {f.name} has wrong shape")
        return cls(spec, blocks)

    def __add__(self, other):
        _match_spec(self, other)
        return EndoMatrix(self.spec, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        _match_spec(self, other)
        return EndoMatrix(self.spec, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return EndoMatrix(self.spec, tuple(-a for a in self.blocks))

    def __matmul__(self, other):
        _match_spec(self, other)
        return EndoMatrix(self.spec, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def pow(self, n):
        return EndoMatrix(self.spec, tuple(b.pow(n) for b in self.blocks))

    def is_integral(self):
        return all(
            entry.is_integral() for b in self.blocks for row in b.rows for entry in row
        )

    def is_zero(self):
        return all(b.is_zero() for b in self.blocks)

    def commutes_with(self, other):
        return (self @ other) == (other @ self)

    def block_dets(self):
        return tuple(b.det() for b in self.blocks)

    def is_isogeny(self):
        return all(bool(d) for d in self.block_dets())


def rational_representation_q(endo: EndoMatrix):
    """Block-diagonal action on H_1(A) ⊗ Q as Fraction rows."""
    n = endo.spec.lattice_rank
    out = [[Fraction(0)] * n for _ in range(n)]
    offsets = endo.spec.lattice_offsets()
    for f, block, off in zip(endo.spec.factors, endo.blocks, offsets):
        d2 = f.ring.lattice_rank
        for a in range(f.multiplicity):
            for b in range(f.multiplicity):
                entry = block.rows[a][b]
                if not entry:
                    continue
                rep = f.ring.lattice_matrix(entry)
                for r in range(d2):
                    row = out[off + a * d2 + r]
                    src = rep[r]
                    for c in range(d2):
                        if src[c]:
                            row[off + b * d2 + c] += src[c]
    return out


def rational_representation(endo: EndoMatrix):
    """Integer action on H_1(A); requires an integral endomorphism."""
    rows = rational_representation_q(endo)
    out = []
    for row in rows:
        ints = []
        for x in row:
            if x.denominator != 1:
                raise ValidationError("endomorphism is not integral")
            ints.append(int(x))
        out.append(ints)
    return out


@dataclasses.dataclass(frozen=True)
class ConnectedSubgroup:
    """Connected algebraic subgroup: one subspace per isotypic factor."""

    spec: AbelianVarietySpec
    parts: tuple[Subspace, ...]

    @classmethod
    def from_parts(cls, spec, parts):
        parts = tuple(parts)
        if len(parts) != len(spec.factors):
            raise DimensionMismatch("one part per factor required")
        for f, p in zip(spec.factors, parts):
            if p.ambient != f.multiplicity:
                raise DimensionMismatch(f"part for {f.name} has wrong ambient")
        return cls(spec, parts)

    @property
    def variety_dim(self):
        return sum(
            p.dim * f.ring.factor_dim for p, f in zip(self.parts, self.spec.factors)
        )

    def add(self, other):
        _match_spec(self, other)
        return ConnectedSubgroup(
            self.spec, tuple(a.add(b) for a, b in zip(self.parts, other.parts))
        )

    def intersect(self, other):
        _match_spec(self, other)
        return ConnectedSubgroup(
            self.spec, tuple(a.intersect(b) for a, b in zip(self.parts, other.parts))
        )

    def contains(self, other):
        _match_spec(self, other)
        return all(a.contains_subspace(b) for a, b in zip(self.parts, other.parts))

    def is_full(self):
        return all(p.is_full() for p in self.parts)

    def is_zero(self):
        return all(p.is_zero() for p in self.parts)

    def image_under(self, endo: EndoMatrix):
        _match_spec(self, endo)
        return ConnectedSubgroup(
            self.spec,
            tuple(p.image_under(b) for p, b in zip(self.parts, endo.blocks)),
        )


def kernel_subgroup(endo: EndoMatrix):
    """Connected kernel (largest connected subgroup killed by endo)."""
    from .linalg import matrix_kernel

    return ConnectedSubgroup(
        endo.spec, tuple(matrix_kernel(b) for b in endo.blocks)
    )


def image_subgroup(endo: EndoMatrix):
    from .linalg import matrix_image

    return ConnectedSubgroup(
        endo.spec, tuple(matrix_image(b) for b in endo.blocks)
    )


def _merge_torsion(spec, torsion_terms):
    """Collapse (order, vector) terms to one canonical term or None."""
    n = spec.lattice_rank
    terms = []
    for m, vec in torsion_terms:
        m = int(m)
        if m < 1:
            raise ValidationError("torsion order must be positive")
        vec = [int(x) % m for x in vec] if m > 1 else [0] * n
        if len(vec) != n:
            raise DimensionMismatch("torsion vector has wrong length")
        if any(vec):
            terms.append((m, vec))
    if not terms:
        return None
    lcm = 1
    for m, _ in terms:
        lcm = lcm * m // math.gcd(lcm, m)
    total = [0] * n
    for m, vec in terms:
        scale = lcm // m
        for i, x in enumerate(vec):
            total[i] = (total[i] + scale * x) % lcm
    g = lcm
    for x in total:
        g = math.gcd(g, x)
    if g == lcm:
        return None
    order = lcm // g
    return (order, tuple((x // g) % order for x in total))


@dataclasses.dataclass(frozen=True)
class SymbolicPoint:
    """Formal point: generic terms with coefficients, plus one torsion term."""

    spec: AbelianVarietySpec
    terms: tuple[tuple[str, EndoMatrix], ...]
    torsion: tuple[int, tuple[int, ...]] | None
    supports: tuple[tuple[str, ConnectedSubgroup], ...]

    @classmethod
    def make(cls, spec, terms, torsion_terms=(), supports=()):
        support_map = dict(supports)
        merged: dict[str, EndoMatrix] = {}
        for name, coeff in terms:
            if name in merged:
                merged[name] = merged[name] + coeff
            else:
                merged[name] = coeff
        kept = []
        for name in sorted(merged):
            if merged[name].is_zero():
                continue
            if name not in support_map:
                raise UndeclaredGenerator(name)
            kept.append((name, merged[name]))
        torsion = _merge_torsion(spec, torsion_terms)
        sup = tuple((name, support_map[name]) for name, _ in kept)
        return cls(spec, tuple(kept), torsion, sup)

    @classmethod
    def zero(cls, spec):
        return cls.make(spec, ())

    @classmethod
    def generic(cls, spec, name, support=None, coeff=None):
        if support is None:
            support = spec.full_group()
        if coeff is None:
            coeff = spec.endo_identity()
        return cls.make(spec, [(name, coeff)], (), [(name, support)])

    @classmethod
    def torsion_point(cls, spec, order, vector):
        return cls.make(spec, (), [(order, vector)])

    def is_zero(self):
        return not self.terms and self.torsion is None

    @property
    def torsion_order(self):
        return self.torsion[0] if self.torsion else 1

    def _support_items(self, other):
        merged = dict(self.supports)
        for name, sub in other.supports:
            if name in merged and merged[name] != sub:
                raise ValidationError(f"conflicting supports for {name!r}")
            merged[name] = sub
        return merged.items()

    def __add__(self, other):
        _match_spec(self, other)
        torsion_terms = [t for t in (self.torsion, other.torsion) if t]
        return SymbolicPoint.make(
            self.spec,
            self.terms + other.terms,
            torsion_terms,
            self._support_items(other),
        )

    def __neg__(self):
        torsion_terms = []
        if self.torsion:
            m, v = self.torsion
            torsion_terms.append((m, tuple((-x) % m for x in v)))
        return SymbolicPoint.make(
            self.spec,
            [(name, -c) for name, c in self.terms],
            torsion_terms,
            self.supports,
        )

    def __sub__(self, other):
        return self + (-other)

    def scalar_mul(self, q):
        """Multiply by an integer or rational scalar.

        A rational scalar picks the exact-rational representative on the
        torsion part (denominators merge into the torsion order).
        """
        q = Fraction(q)
        terms = [
            (name, EndoMatrix(c.spec, tuple(b.scale(_ring_scalar(b, q)) for b in c.blocks)))
            for name, c in self.terms
        ]
        torsion_terms = []
        if self.torsion:
            m, v = self.torsion
            torsion_terms.append(
                (m * q.denominator, tuple(int(x * q.numerator) % (m * q.denominator) for x in v))
            )
        return SymbolicPoint.make(self.spec, terms, torsion_terms, self.supports)

    def apply_matrix(self, endo: EndoMatrix):
        """Image under an endomorphism (or rational combination of one)."""
        _match_spec(self, endo)
        terms = [(name, endo @ c) for name, c in self.terms]
        torsion_terms = []
        if self.torsion:
            m, v = self.torsion
            rep = rational_representation_q(endo)
            n = self.spec.lattice_rank
            out = []
            den = 1
            for i in range(n):
                acc = Fraction(0)
                for j in range(n):
                    if rep[i][j] and v[j]:
                        acc += rep[i][j] * v[j]
                acc = acc / m
                out.append(acc)
                den = den * acc.denominator // math.gcd(den, acc.denominator)
            torsion_terms.append(
                (den, tuple(int(x * den) % den if den > 1 else 0 for x in out))
            )
        return SymbolicPoint.make(self.spec, terms, torsion_terms, self.supports)

    def closure_connected(self):
        """Connected component of the smallest algebraic subgroup whose
        translate contains the point (the torsion part does not move it)."""
        support_map = dict(self.supports)
        acc = self.spec.zero_group()
        for name, coeff in self.terms:
            acc = acc.add(support_map[name].image_under(coeff))
        return acc


def _ring_scalar(block: ExactMatrix, q: Fraction):
    return block.field.from_rational(q)


def point_closure(p: SymbolicPoint):
    """(connected closure, torsion multiplier) of a symbolic point."""
    return p.closure_connected(), p.torsion_order


@dataclasses.dataclass(frozen=True)
class AffineEndo:
    """sigma = (translation by y) ∘ tau with tau an isogeny."""

    tau: EndoMatrix
    translation: SymbolicPoint

    @property
    def spec(self):
        return self.tau.spec

    @classmethod
    def of(cls, tau, translation=None):
        if translation is None:
            translation = SymbolicPoint.zero(tau.spec)
        _match_spec(tau, translation)
        return cls(tau, translation)

    def compose(self, other):
        """self ∘ other as affine maps: x -> tau(tau'(x) + y') + y."""
        _match_spec(self.tau, other.tau)
        return AffineEndo(
            self.tau @ other.tau,
            other.translation.apply_matrix(self.tau) + self.translation,
        )


def apply_affine(sigma: AffineEndo, p: SymbolicPoint):
    return p.apply_matrix(sigma.tau) + sigma.translation


def iterate_affine(sigma: AffineEndo, n: int):
    """sigma^n as an affine map, with the geometric sum taken exactly."""
    if n < 0:
        raise ValidationError("negative iterate")
    power, geom = _pow_sum(sigma.tau, n)
    return AffineEndo(power, sigma.translation.apply_matrix(geom))


def _pow_sum(tau: EndoMatrix, n: int):
    """(tau^n, sum_{i<n} tau^i) by binary splitting."""
    if n == 0:
        return tau.spec.endo_identity(), tau.spec.endo_zero()
    p_half, s_half = _pow_sum(tau, n // 2)
    p_even = p_half @ p_half
    s_even = s_half + (p_half @ s_half)
    if n % 2:
        return p_even @ tau, s_even + p_even
    return p_even, s_even


@dataclasses.dataclass(frozen=True)
class QuotientData:
    """Projection A -> A/C on the level of factor blocks."""

    source: AbelianVarietySpec
    target: AbelianVarietySpec
    projections: tuple[ExactMatrix, ...]


def quotient_data(c: ConnectedSubgroup):
    """Quotient projection by a connected subgroup, factor by factor."""
    spec = c.spec
    projections = []
    new_factors = []
    for f, part in zip(spec.factors, c.parts):
        k = f.multiplicity
        pivset = set(part.pivots)
        free = [j for j in range(k) if j not in pivset]
        zero, one = f.ring.zero(), f.ring.one()
        rows = []
        for a, fa in enumerate(free):
            row = [zero] * k
            row[fa] = one
            for i, p in enumerate(part.pivots):
                row[p] = -part.rows[i][fa]
            rows.append(tuple(row))
        proj = ExactMatrix.from_rows(f.ring, rows) if rows else ExactMatrix.zeros(f.ring, 0, k)
        projections.append(proj)
        new_factors.append(Factor(f.name, f.ring, len(free)))
        # the subgroup maps to zero and the projection is onto
        if rows:
            for r in part.rows:
                if any(proj.apply(r)):
                    raise AssertionError("quotient projection does not kill subgroup")
    target = AbelianVarietySpec.create(new_factors)
    return QuotientData(spec, target, tuple(projections))


def _cleared_basis_matrix(part: Subspace, ring: RingSpec, k: int):
    """Columns = basis vectors scaled to be R-integral."""
    cols = []
    for row in part.rows:
        den = 1
        for entry in row:
            for c in entry.coords:
                den = den * c.denominator // math.gcd(den, c.denominator)
        cols.append(tuple(entry * den for entry in row))
    if not cols:
        return ExactMatrix.zeros(ring, k, 0)
    return ExactMatrix.from_rows(ring, list(zip(*cols)))


def _block_rep_columns(bmat: ExactMatrix, ring: RingSpec):
    """Integer columns of the homology representation of a factor matrix."""
    k = bmat.nrows
    dim = bmat.ncols
    d2 = ring.lattice_rank
    cols = []
    for b in range(dim):
        reps = []
        for a in range(k):
            entry = bmat.rows[a][b]
            rep = ring.lattice_matrix(entry)
            reps.append(rep)
        for beta in range(d2):
            col = []
            for a in range(k):
                for r in range(d2):
                    x = reps[a][r][beta]
                    if x.denominator != 1:
                        raise ValidationError("basis matrix not integral")
                    col.append(int(x))
            cols.append(col)
    return cols


def subgroup_lattice_rows(c: ConnectedSubgroup):
    """Saturated basis rows of H_1(C) inside Z^{2g}."""
    spec = c.spec
    width = spec.lattice_rank
    offsets = spec.lattice_offsets()
    rows = []
    for f, part, off in zip(spec.factors, c.parts, offsets):
        bmat = _cleared_basis_matrix(part, f.ring, f.multiplicity)
        cols = _block_rep_columns(bmat, f.ring)
        local = lattice_saturation(cols, f.lattice_rank)
        for lr in local:
            row = [0] * width
            row[off : off + f.lattice_rank] = lr
            rows.append(row)
    return rows


def quotient_projection_rows(c: ConnectedSubgroup):
    """Saturated integer projection rows with kernel exactly H_1(C)."""
    spec = c.spec
    width = spec.lattice_rank
    offsets = spec.lattice_offsets()
    rows = []
    for f, part, off in zip(spec.factors, c.parts, offsets):
        bmat = _cleared_basis_matrix(part, f.ring, f.multiplicity)
        cols = _block_rep_columns(bmat, f.ring)
        nloc = f.lattice_rank
        mat = [[cols[j][i] for j in range(len(cols))] for i in range(nloc)]
        local = left_kernel_saturated(mat)
        for lr in local:
            row = [0] * width
            row[off : off + nloc] = lr
            rows.append(row)
    return rows


@dataclasses.dataclass(frozen=True)
class FibrationCertificate:
    """Data of a preserved fibration: quotient by C composed with mult-by-m
    is constant on every orbit of the n-th powers of the generators."""

    c: ConnectedSubgroup
    m: int
    n: int
    bezout_k: int


@dataclasses.dataclass(frozen=True)
class DenseWitnessSpec:
    """Data supporting a dense-orbit claim for a starting point in general
    position: the splitting subgroups, per-generator closure targets, and
    the independence constraints the starting point must satisfy."""

    b1: ConnectedSubgroup
    b2: ConnectedSubgroup
    targets: tuple[tuple[str, ConnectedSubgroup], ...]
    constraints: tuple[dict, ...]
