"""Normalization pipeline for commuting families of affine endomorphisms.

Order of operations: kill root-of-unity eigenvalues by a uniform power,
split the ambient variety into the unit-eigenvalue part B2 and its
complement B1, then trade the generator set for products whose group parts
avoid eigenvalue 1 on B1.  The exponent bookkeeping of that trade lives in
an integer lattice; its last elementary divisor is the extra power needed
to land every original generator in the normalized monoid.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

from .errors import (
    NonCommuting,
    NormalizationNotApplied,
    NotDominant,
    NotFiniteIndex,
    SearchExhausted,
    ValidationError,
)
from .intpoly import cyclotomic_divisors, minimal_polynomial
from .linalg import QQ, ExactMatrix, Subspace, kernel_image, restriction_matrix
from .model import (
    AbelianVarietySpec,
    AffineEndo,
    ConnectedSubgroup,
    iterate_affine,
    kernel_subgroup,
    image_subgroup,
    rational_representation,
)
from .smith import diagonal_of, integer_solve, smith_normal_form


@dataclasses.dataclass(frozen=True)
class GeneratorSet:
    """Finite generating family of a commutative affine monoid."""

    spec: AbelianVarietySpec
    names: tuple[str, ...]
    gens: tuple[AffineEndo, ...]
    powered_exponent: int = 1

    @classmethod
    def create(cls, spec, names, gens, powered_exponent=1):
        names = tuple(names)
        gens = tuple(gens)
        if len(names) != len(gens):
            raise ValidationError("one name per generator required")
        if len(set(names)) != len(names):
            raise ValidationError("generator names must be unique")
        if not gens:
            raise ValidationError("at least one generator required")
        for g in gens:
            if g.spec is not spec and g.spec != spec:
                raise ValidationError("generator belongs to a different spec")
        return cls(spec, names, gens, powered_exponent)

    def __len__(self):
        return len(self.gens)


def check_commuting(genset: GeneratorSet):
    """Raise NonCommuting(i, j) on the first non-commuting group-part pair."""
    gens = genset.gens
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not gens[i].tau.commutes_with(gens[j].tau):
                raise NonCommuting(i, j)


def check_dominant(genset: GeneratorSet):
    for i, g in enumerate(genset.gens):
        if not g.tau.is_isogeny():
            raise NotDominant(i)


def unity_power(genset: GeneratorSet):
    """lcm of the orders of the root-of-unity eigenvalues of the generators."""
    n = 1
    for g in genset.gens:
        f = minimal_polynomial(rational_representation(g.tau))
        for m in cyclotomic_divisors(f):
            n = n * m // math.gcd(n, m)
    return n


def power_up(genset: GeneratorSet, n: int):
    """Replace every generator by its n-th power."""
    if n < 1:
        raise ValidationError("power must be positive")
    if n == 1:
        return genset
    return GeneratorSet(
        genset.spec,
        genset.names,
        tuple(iterate_affine(g, n) for g in genset.gens),
        genset.powered_exponent * n,
    )


@dataclasses.dataclass(frozen=True)
class SplitData:
    """Invariant splitting A = B1 ⊕ B2 for a normalized commuting family.

    B2 collects the generalized eigenvalue-1 directions of every generator;
    B1 is spanned by their complements.
    """

    b1: ConnectedSubgroup
    b2: ConnectedSubgroup


def _fitting_pair(gen: AffineEndo):
    """(kernel, image) of (tau-id)^e with e past stabilization."""
    spec = gen.spec
    delta = gen.tau - spec.endo_identity()
    kparts = []
    iparts = []
    for f, block in zip(spec.factors, delta.blocks):
        power = block.pow(max(f.multiplicity, 1))
        ker, img = kernel_image(power)
        kparts.append(ker)
        iparts.append(img)
    return (
        ConnectedSubgroup(spec, tuple(kparts)),
        ConnectedSubgroup(spec, tuple(iparts)),
    )


def splitting_subgroups(genset: GeneratorSet):
    """B2 = meet of unit-eigenvalue parts, B1 = join of their complements."""
    spec = genset.spec
    b2 = spec.full_group()
    b1 = spec.zero_group()
    for idx, g in enumerate(genset.gens):
        ker, img = _fitting_pair(g)
        joined = ker.add(img)
        meet = ker.intersect(img)
        if not joined.is_full() or not meet.is_zero():
            raise NormalizationNotApplied(
                f"generator {idx}: unit-eigenvalue part is not split off"
            )
        b2 = b2.intersect(ker)
        b1 = b1.add(img)
    total = b1.add(b2)
    overlap = b1.intersect(b2)
    if not total.is_full() or not overlap.is_zero():
        raise NormalizationNotApplied("B1 and B2 are not complementary")
    for g in genset.gens:
        if not b1.contains(b1.image_under(g.tau)):
            raise AssertionError("B1 is not invariant")
        if not b2.contains(b2.image_under(g.tau)):
            raise AssertionError("B2 is not invariant")
        delta = g.tau - spec.endo_identity()
        for f, part, block in zip(spec.factors, b2.parts, delta.blocks):
            if part.dim:
                restr = restriction_matrix(block, part)
                if not restr.pow(part.dim).is_zero():
                    raise AssertionError("generator is not unipotent on B2")
    return SplitData(b1, b2)


def minimalize_generators(genset: GeneratorSet, split: SplitData):
    """Replace each generator by gen_i ∘ prod_j gen_j^{m_j} so the group part
    moves B1 with no eigenvalue 1, keeping the exponent vectors independent.

    Returns (new GeneratorSet, exponent vectors e_i + m).  Deterministic:
    the lexicographically smallest admissible exponent vector wins.
    """
    s = len(genset)
    bound = genset.spec.lattice_rank + 1
    # candidate words act on B1 through products of small commuting
    # matrices; precompute each generator's restriction powers so the
    # scan never composes full affine words
    powers = []
    for g in genset.gens:
        per_part = []
        for part, block in zip(split.b1.parts, g.tau.blocks):
            if not part.dim:
                continue
            restr = restriction_matrix(block, part)
            table = [ExactMatrix.identity(restr.field, restr.nrows)]
            for _ in range(bound + 1):
                table.append(table[-1] @ restr)
            per_part.append(table)
        powers.append(per_part)
    n_parts = len(powers[0]) if powers else 0
    idents = [powers[0][p][0] for p in range(n_parts)] if s else []

    def lex_smallest(i, acc_space):
        exps = [0] * s

        def admissible(prod):
            vec = [Fraction(exps[j] + (1 if j == i else 0)) for j in range(s)]
            if acc_space.contains(vec):
                return False
            return all(bool((prod[p] - idents[p]).det()) for p in range(n_parts))

        def rec(j, prod):
            if j == s:
                return admissible(prod)
            for e in range(bound + 1):
                exps[j] = e
                step = e + (1 if j == i else 0)
                nxt = [prod[p] @ powers[j][p][step] for p in range(n_parts)]
                if rec(j + 1, nxt):
                    return True
            exps[j] = 0
            return False

        if not rec(0, idents):
            return None
        return tuple(exps)

    accepted = []
    vectors = []
    acc_space = Subspace.zero(QQ, s)
    for i in range(s):
        m = lex_smallest(i, acc_space)
        if m is None:
            raise SearchExhausted(
                f"no admissible replacement word for generator {i}"
            )
        vec = tuple((1 if j == i else 0) + m[j] for j in range(s))
        word = genset.gens[i]
        for j in range(s):
            if m[j]:
                word = word.compose(iterate_affine(genset.gens[j], m[j]))
        accepted.append(word)
        vectors.append(vec)
        acc_space = acc_space.add(
            Subspace.span(QQ, s, [[Fraction(x) for x in vec]])
        )
    new = GeneratorSet(
        genset.spec, genset.names, tuple(accepted), genset.powered_exponent
    )
    return new, tuple(vectors)


def lattice_exponent(vectors):
    """Last elementary divisor of the lattice spanned by the vectors.

    Raises NotFiniteIndex when they do not span a finite-index sublattice.
    """
    vectors = [list(v) for v in vectors]
    if not vectors:
        raise NotFiniteIndex("no vectors given")
    s = len(vectors[0])
    if any(len(v) != s for v in vectors):
        raise ValidationError("ragged exponent vectors")
    _, d, _, _, _ = smith_normal_form(vectors)
    diag = diagonal_of(d)
    if len(diag) < s:
        raise NotFiniteIndex("exponent vectors are not full rank")
    return abs(diag[s - 1])


def bar_membership(x, tuples):
    """Whether x lies in the subgroup generated by the tuples inside Z^s;
    equivalently some translate x + y with y, z in the generated sub-monoid
    satisfies x + y = z."""
    x = list(x)
    tuples = [list(t) for t in tuples]
    if any(c < 0 for c in x) or any(c < 0 for t in tuples for c in t):
        raise ValidationError("bar membership is defined for natural tuples")
    s = len(x)
    for t in tuples:
        if len(t) != s:
            raise ValidationError("ragged tuples")
    if not tuples:
        return not any(x)
    mat = [[t[i] for t in tuples] for i in range(s)]
    return integer_solve(mat, x) is not None


def independent_lex_subset(vectors):
    """Lexicographically least maximal Q-independent subset, greedy order."""
    ordered = sorted(tuple(v) for v in vectors)
    space = None
    out = []
    for v in ordered:
        fv = [Fraction(x) for x in v]
        if space is None:
            space = Subspace.zero(QQ, len(v))
        if space.contains(fv):
            continue
        out.append(v)
        space = space.add(Subspace.span(QQ, len(v), [fv]))
    return tuple(out)
