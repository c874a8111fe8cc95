"""Dichotomy analysis: invariant fibration or dense-orbit witness.

Both pipelines normalize eigenvalues first (uniform power), split off the
unit-eigenvalue part, and then compare the subgroup generated by translation
closures and unit-part displacements against the ambient variety.  A proper
comparison subgroup C yields a fibration certificate: quotient by C followed
by multiplication by the torsion multiplier is constant on every orbit of
the n-th powers of the declared generators.  Otherwise the starting point in
general position has a dense orbit and the emitted witness records what
"general position" means.
"""

from __future__ import annotations

import dataclasses
import math

from .errors import NotDominant, ValidationError
from .intpoly import bezout_at_one, eval_at_endo, minimal_polynomial, split_at_one
from .linalg import ExactMatrix, restriction_matrix, projection_pair
from .model import (
    AbelianVarietySpec,
    AffineEndo,
    ConnectedSubgroup,
    DenseWitnessSpec,
    EndoMatrix,
    FibrationCertificate,
    SymbolicPoint,
    image_subgroup,
    iterate_affine,
    rational_representation,
)
from .reduction import (
    GeneratorSet,
    SplitData,
    check_commuting,
    check_dominant,
    lattice_exponent,
    minimalize_generators,
    power_up,
    splitting_subgroups,
    unity_power,
)


@dataclasses.dataclass(frozen=True)
class Verdict:
    kind: str  # "fibration" | "dense"
    c: ConnectedSubgroup
    torsion_multiplier: int
    powered_exponent: int
    bezout_k: int
    certificate: FibrationCertificate | None
    witness: DenseWitnessSpec | None
    reduction_log: tuple[dict, ...]
    single_generator_dense: tuple[str, ...] = ()

    def is_fibration(self):
        return self.kind == "fibration"


def _projection_endos(spec, b1, b2):
    """(P1, P2) as rational endomorphism matrices for A = B1 ⊕ B2."""
    p1_blocks = []
    p2_blocks = []
    for f, u, v in zip(spec.factors, b1.parts, b2.parts):
        p1, p2 = projection_pair(u, v)
        p1_blocks.append(p1)
        p2_blocks.append(p2)
    return (
        EndoMatrix.from_blocks(spec, p1_blocks),
        EndoMatrix.from_blocks(spec, p2_blocks),
    )


def _strip_torsion(point: SymbolicPoint):
    return SymbolicPoint.make(point.spec, point.terms, (), point.supports)


def _eval_poly_endo(poly, endo: EndoMatrix):
    return EndoMatrix.from_blocks(
        endo.spec, [eval_at_endo(poly, b) for b in endo.blocks]
    )


def _unit_split(sigma: AffineEndo):
    """(A1, A2, f1, r): A1 = im (tau-id)^r, A2 = im f1(tau)."""
    spec = sigma.spec
    f = minimal_polynomial(rational_representation(sigma.tau))
    if f.degree > spec.lattice_rank:
        raise AssertionError("minimal polynomial degree exceeds lattice rank")
    f1, r = split_at_one(f)
    delta = sigma.tau - spec.endo_identity()
    a1 = image_subgroup(delta.pow(r))
    a2 = image_subgroup(_eval_poly_endo(f1, sigma.tau))
    total = a1.add(a2)
    meet = a1.intersect(a2)
    assert total.is_full() and meet.is_zero()
    assert a1.contains(a1.image_under(sigma.tau))
    assert a2.contains(a2.image_under(sigma.tau))
    return a1, a2, f1, r


def conjugate_reduction(sigma: AffineEndo, a1: ConnectedSubgroup):
    """Conjugate sigma by a translation killing the A1-part of its own
    translation: returns (conjugated map, the conjugating point y0).

    y0 solves (id - tau) y0 = P1(y); it exists because tau has no
    eigenvalue 1 on A1.  Torsion parts ride along exactly.
    """
    spec = sigma.spec
    _, a2, _, _ = _unit_split(sigma)
    p1, _ = _projection_endos(spec, a1, a2)
    y1 = sigma.translation.apply_matrix(p1)
    blocks = []
    for f, part, tau_block in zip(spec.factors, a1.parts, sigma.tau.blocks):
        k = f.multiplicity
        if part.dim == 0:
            blocks.append(ExactMatrix.zeros(f.ring, k, k))
            continue
        restr = restriction_matrix(tau_block, part)
        inner = (ExactMatrix.identity(f.ring, part.dim) - restr).inverse()
        bmat = part.basis_matrix()
        zero, one = f.ring.zero(), f.ring.one()
        coords = ExactMatrix.from_rows(
            f.ring,
            [
                [one if j == p else zero for j in range(k)]
                for p in part.pivots
            ],
        )
        blocks.append(bmat @ inner @ coords)
    lift = EndoMatrix.from_blocks(spec, blocks)
    y0 = y1.apply_matrix(lift)
    delta = sigma.tau - spec.endo_identity()
    conj = AffineEndo(sigma.tau, sigma.translation + y0.apply_matrix(delta))
    moved = conj.translation.apply_matrix(p1)
    assert _strip_torsion(moved).closure_connected().is_zero()
    return conj, y0


def _assert_certificate(spec, powered, extra_power, c, m):
    """The certified map must be constant on orbits of every generator's
    (powered_exponent)-th power; checked symbolically here."""
    for g in powered.gens:
        hat = iterate_affine(g, extra_power)
        delta = hat.tau - spec.endo_identity()
        assert c.contains(image_subgroup(delta)), "displacement escapes C"
        closure = _strip_torsion(hat.translation).closure_connected()
        assert c.contains(closure), "translation closure escapes C"
        assert m % hat.translation.torsion_order == 0, "torsion order misses m"


def analyze_cyclic(spec: AbelianVarietySpec, sigma: AffineEndo, name="g1"):
    """Dichotomy for the monoid generated by a single affine map."""
    if not sigma.tau.is_integral():
        raise ValidationError("group part must be integral")
    genset = GeneratorSet.create(spec, (name,), (sigma,))
    check_dominant(genset)
    log = [
        {
            "step": "validate",
            "generators": 1,
            "lattice_rank": spec.lattice_rank,
        }
    ]
    n1 = unity_power(genset)
    log.append({"step": "unity_power", "n": n1})
    powered = power_up(genset, n1)
    sp = powered.gens[0]
    a1, a2, f1, r = _unit_split(sp)
    log.append(
        {
            "step": "unit_split",
            "unit_multiplicity": r,
            "a1_dim": a1.variety_dim,
            "a2_dim": a2.variety_dim,
        }
    )
    if r >= 1:
        _, _, k = bezout_at_one(f1, r)
    else:
        k = 1
    log.append({"step": "bezout", "k": k})
    conj, y0 = conjugate_reduction(sp, a1)
    log.append(
        {
            "step": "conjugation",
            "applied": not y0.is_zero(),
        }
    )
    _, p2 = _projection_endos(spec, a1, a2)
    delta = sp.tau - spec.endo_identity()
    y2 = _strip_torsion(sp.translation).apply_matrix(p2)
    b = a2.image_under(delta).add(y2.closure_connected())
    m = sp.translation.torsion_order
    c = a1.add(b)
    log.append(
        {
            "step": "branch",
            "c_dim": c.variety_dim,
            "ambient_dim": spec.g,
            "proper": not c.is_full(),
        }
    )
    if not c.is_full():
        _assert_certificate(spec, powered, 1, c, m)
        cert = FibrationCertificate(c, m, n1, k)
        return Verdict(
            "fibration", c, m, n1, k, cert, None, tuple(log)
        )
    witness = DenseWitnessSpec(
        b1=a1,
        b2=a2,
        targets=((name, a2),),
        constraints=(
            {
                "kind": "decomposition",
                "statement": "write x = x1 + x2 along B1 + B2",
            },
            {
                "kind": "module_generation",
                "part": "B1",
                "statement": "x1 generates a Zariski-dense submodule of B1 "
                "over the endomorphisms generated by the group parts",
            },
            {
                "kind": "closure_target",
                "generator": name,
                "statement": "the closure of (tau-id)(x2) + y2 is the listed "
                "target subgroup",
            },
        ),
    )
    return Verdict(
        "dense", c, m, n1, k, None, witness, tuple(log), (name,)
    )


def analyze_monoid(spec: AbelianVarietySpec, genset: GeneratorSet):
    """Dichotomy for a finitely generated commuting family."""
    for g in genset.gens:
        if not g.tau.is_integral():
            raise ValidationError("group parts must be integral")
    check_commuting(genset)
    check_dominant(genset)
    log = [
        {
            "step": "validate",
            "generators": len(genset),
            "lattice_rank": spec.lattice_rank,
        }
    ]
    n1 = unity_power(genset)
    log.append({"step": "unity_power", "n": n1})
    powered = power_up(genset, n1)
    split = splitting_subgroups(powered)
    log.append(
        {
            "step": "splitting",
            "b1_dim": split.b1.variety_dim,
            "b2_dim": split.b2.variety_dim,
        }
    )
    minimalized, vectors = minimalize_generators(powered, split)
    log.append({"step": "minimalize", "vectors": [list(v) for v in vectors]})
    n2 = lattice_exponent(vectors)
    log.append({"step": "lattice_exponent", "n": n2})
    k_total = 1
    for g in powered.gens:
        _, _, f1, r = _unit_split(g)
        if r >= 1:
            _, _, kg = bezout_at_one(f1, r)
        else:
            kg = 1
        k_total = k_total * kg // math.gcd(k_total, kg)
    log.append({"step": "bezout", "k": k_total})
    _, p2 = _projection_endos(spec, split.b1, split.b2)
    targets = []
    c_s = spec.zero_group()
    m = 1
    for g in powered.gens:
        m = m * g.translation.torsion_order // math.gcd(
            m, g.translation.torsion_order
        )
    for name, g in zip(minimalized.names, minimalized.gens):
        delta = g.tau - spec.endo_identity()
        y2 = _strip_torsion(g.translation).apply_matrix(p2)
        ci = y2.closure_connected().add(split.b2.image_under(delta))
        targets.append((name, ci))
        c_s = c_s.add(ci)
        m = m * g.translation.torsion_order // math.gcd(
            m, g.translation.torsion_order
        )
    n_total = n1 * n2
    c = split.b1.add(c_s)
    log.append(
        {
            "step": "branch",
            "c_dim": c.variety_dim,
            "ambient_dim": spec.g,
            "proper": not c.is_full(),
        }
    )
    if not c.is_full():
        _assert_certificate(spec, powered, n2, c, m)
        cert = FibrationCertificate(c, m, n_total, k_total)
        return Verdict(
            "fibration", c, m, n_total, k_total, cert, None, tuple(log)
        )
    dense_alone = []
    for name, g in zip(genset.names, genset.gens):
        sub = analyze_cyclic(spec, g, name)
        if not sub.is_fibration():
            dense_alone.append(name)
    log.append({"step": "single_generator", "dense": list(dense_alone)})
    witness = DenseWitnessSpec(
        b1=split.b1,
        b2=split.b2,
        targets=tuple(targets),
        constraints=(
            {
                "kind": "decomposition",
                "statement": "write x = x1 + x2 along B1 + B2",
            },
            {
                "kind": "module_generation",
                "part": "B1",
                "statement": "x1 generates a Zariski-dense submodule of B1 "
                "over the endomorphisms generated by the group parts",
            },
        )
        + tuple(
            {
                "kind": "closure_target",
                "generator": name,
                "statement": "the closure of (tau_i-id)(x2) + y_i2 contains "
                "the listed target subgroup",
            }
            for name, _ in targets
        ),
    )
    return Verdict(
        "dense",
        c,
        m,
        n_total,
        k_total,
        None,
        witness,
        tuple(log),
        tuple(dense_alone),
    )


def analyze(spec: AbelianVarietySpec, genset: GeneratorSet):
    """Dispatch: single generator goes through the cyclic pipeline."""
    if len(genset) == 1:
        return analyze_cyclic(spec, genset.gens[0], genset.names[0])
    return analyze_monoid(spec, genset)


def _require_unipotent(sigma: AffineEndo):
    from .errors import NonUnipotent

    spec = sigma.spec
    delta = sigma.tau - spec.endo_identity()
    if not delta.pow(spec.lattice_rank).is_zero():
        raise NonUnipotent("group part is not unipotent")
    return delta


def orbit_closed_form(sigma: AffineEndo, x: SymbolicPoint, n: int):
    """sigma^n(x) written with binomial coefficients: x plus
    sum_j binom(n, j) (tau-id)^{j-1} applied to ((tau-id)x + y)."""
    if n < 0:
        raise ValidationError("negative iterate")
    delta = _require_unipotent(sigma)
    w = x.apply_matrix(delta) + sigma.translation
    acc = x
    power = w
    for j in range(1, sigma.spec.lattice_rank + 1):
        coeff = math.comb(n, j)
        if coeff:
            acc = acc + power.scalar_mul(coeff)
        power = power.apply_matrix(delta)
        if power.is_zero() and j >= n:
            break
    return acc


def predicted_orbit_closure(sigma: AffineEndo, x: SymbolicPoint):
    """Limit shape of the orbit of x under a unipotent-part map:
    (connected subgroup, torsion multiplier, coset base point)."""
    delta = _require_unipotent(sigma)
    w = x.apply_matrix(delta) + sigma.translation
    module = spec_module_closure(sigma, w)
    return module, w.torsion_order, x


def spec_module_closure(sigma: AffineEndo, w: SymbolicPoint):
    """Smallest connected subgroup containing closure(w) and stable under
    tau; the orbit differences land in its translates."""
    spec = sigma.spec
    acc = _strip_torsion(w).closure_connected()
    while True:
        nxt = acc.add(acc.image_under(sigma.tau))
        if nxt == acc:
            return acc
        acc = nxt
