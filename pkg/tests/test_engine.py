"""Dichotomy engine: verdicts over the curated suite, conjugation
behavior, closed-form orbits."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbicert.engine import (
    Verdict,
    _unit_split,
    analyze,
    analyze_cyclic,
    analyze_monoid,
    conjugate_reduction,
    orbit_closed_form,
    predicted_orbit_closure,
    spec_module_closure,
)
from orbicert.errors import NonCommuting, NonUnipotent, NotDominant
from orbicert.model import AffineEndo, apply_affine, iterate_affine
from orbicert.reduction import GeneratorSet, power_up, unity_power

from scenario_builders import (
    curated_suite,
    e_power_spec,
    endo,
    generic,
    genset,
    random_commuting_genset,
    suite_by_name,
)

EXPECTED_C_DIM = {
    "identity": 0,
    "shear": 1,
    "jordan3": 2,
    "diag-1-2": 1,
    "diag-1-3": 1,
    "rotation": 0,
    "negation": 0,
    "torsion-translation": 0,
    "shear-torsion": 1,
    "cm-i-blocked": 0,
    "mixed-cm-fibration": 1,
    "jordan-plus-double": 2,
    "pair-diag-12-13": 1,
    "pair-shears": 1,
    "shear-with-torsion-partner": 1,
    "pair-staggered-e3": 2,
    "cm-pair-fibration": 1,
    "pair-unipotent-e4": 2,
}

EXPECTED_M = {
    "torsion-translation": 3,
    "shear-torsion": 3,
    "shear-with-torsion-partner": 3,
}

EXPECTED_N = {"rotation": 4, "negation": 2, "cm-i-blocked": 4}

EXPECTED_K = {"diag-1-3": 2, "pair-diag-12-13": 2, "pair-staggered-e3": 2}

EXPECTED_SINGLE_DENSE = {
    "pair-double-triple": ("g1", "g2"),
    "pair-translations": ("a", "b"),
    "pair-diag-12-21": (),
}


def run(entry):
    return analyze(entry.scenario.spec, entry.scenario.genset)


@pytest.mark.parametrize(
    "name", [c.name for c in curated_suite() if c.expected != "invalid"]
)
def test_curated_verdicts(name):
    entry = suite_by_name()[name]
    verdict = run(entry)
    assert verdict.kind == entry.expected
    if verdict.is_fibration():
        assert verdict.certificate is not None and verdict.witness is None
        assert not verdict.c.is_full()
        assert verdict.c.variety_dim == EXPECTED_C_DIM[name]
        assert verdict.certificate.c == verdict.c
    else:
        assert verdict.witness is not None and verdict.certificate is None
        assert verdict.c.is_full()
    assert verdict.torsion_multiplier == EXPECTED_M.get(name, 1)
    assert verdict.powered_exponent == EXPECTED_N.get(name, 1)
    assert verdict.bezout_k == EXPECTED_K.get(name, 1)
    if name in EXPECTED_SINGLE_DENSE:
        assert verdict.single_generator_dense == EXPECTED_SINGLE_DENSE[name]


def test_invalid_scenarios_rejected():
    by_name = suite_by_name()
    bad = by_name["non-commuting"]
    with pytest.raises(NonCommuting):
        run(bad)
    with pytest.raises(NotDominant):
        run(by_name["non-dominant"])


def test_reduction_log_shapes():
    by_name = suite_by_name()
    cyclic = run(by_name["diag-1-2"])
    assert [e["step"] for e in cyclic.reduction_log] == [
        "validate",
        "unity_power",
        "unit_split",
        "bezout",
        "conjugation",
        "branch",
    ]
    monoid = run(by_name["pair-diag-12-13"])
    assert [e["step"] for e in monoid.reduction_log] == [
        "validate",
        "unity_power",
        "splitting",
        "minimalize",
        "lattice_exponent",
        "bezout",
        "branch",
    ]
    dense = run(by_name["pair-double-triple"])
    assert dense.reduction_log[-1]["step"] == "single_generator"
    assert dense.reduction_log[-1]["dense"] == ["g1", "g2"]


@pytest.mark.parametrize(
    "name",
    [c.name for c in curated_suite()
     if c.expected != "invalid" and len(c.scenario.genset) == 1],
)
def test_singleton_monoid_agrees_with_cyclic(name):
    entry = suite_by_name()[name]
    spec = entry.scenario.spec
    gs = entry.scenario.genset
    via_monoid = analyze_monoid(spec, gs)
    via_cyclic = analyze_cyclic(spec, gs.gens[0], gs.names[0])
    assert via_monoid.kind == via_cyclic.kind
    assert via_monoid.c == via_cyclic.c
    assert via_monoid.torsion_multiplier == via_cyclic.torsion_multiplier


def conjugated(sigma, w):
    """T_{-w} o sigma o T_w, assembled from affine composition."""
    spec = sigma.spec
    shift = AffineEndo.of(spec.endo_identity(), w)
    unshift = AffineEndo.of(spec.endo_identity(), -w)
    return unshift.compose(sigma.compose(shift))


@pytest.mark.parametrize("name", ["diag-1-2", "shear", "doubling", "cm-i-blocked", "rotation"])
def test_conjugation_preserves_verdict_and_c(name):
    entry = suite_by_name()[name]
    spec = entry.scenario.spec
    sigma = entry.scenario.genset.gens[0]
    base = analyze_cyclic(spec, sigma)
    w = generic(spec, "w")
    moved = analyze_cyclic(spec, conjugated(sigma, w))
    assert moved.kind == base.kind
    assert moved.c == base.c
    assert moved.torsion_multiplier == base.torsion_multiplier


def test_conjugate_reduction_frozen():
    e2 = e_power_spec(2)
    sigma = AffineEndo.of(endo(e2, [[1, 0], [0, 2]]), generic(e2, "q"))
    a1, _, _, _ = _unit_split(sigma)
    conj, y0 = conjugate_reduction(sigma, a1)
    (name, coeff), = y0.terms
    assert name == "q"
    assert coeff == endo(e2, [[0, 0], [0, -1]])
    (name, coeff), = conj.translation.terms
    assert coeff == endo(e2, [[1, 0], [0, 0]])


@given(st.integers(min_value=0, max_value=10**6))
def test_unit_split_random(seed):
    rng = random.Random(seed)
    gs = random_commuting_genset(rng, rng.randint(1, 3), 1)
    gs = power_up(gs, unity_power(gs))
    a1, a2, f1, r = _unit_split(gs.gens[0])
    assert a1.add(a2).is_full()
    assert a1.intersect(a2).is_zero()
    assert f1(1) != 0
    assert r >= 0


@given(st.integers(min_value=0, max_value=30))
def test_closed_form_matches_iteration(n):
    e3 = e_power_spec(3)
    tau = endo(e3, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    sigma = AffineEndo.of(tau, generic(e3, "p"))
    x = generic(e3, "x")
    direct = x
    for _ in range(n):
        direct = apply_affine(sigma, direct)
    assert orbit_closed_form(sigma, x, n) == direct
    assert apply_affine(iterate_affine(sigma, n), x) == direct


def test_closed_form_rejects_non_unipotent():
    e1 = e_power_spec(1)
    sigma = AffineEndo.of(endo(e1, [[2]]))
    with pytest.raises(NonUnipotent):
        orbit_closed_form(sigma, generic(e1, "x"), 3)


def test_predicted_closure_shear():
    e2 = e_power_spec(2)
    sigma = AffineEndo.of(endo(e2, [[1, 1], [0, 1]]))
    module, mult, base = predicted_orbit_closure(sigma, generic(e2, "x"))
    assert module.variety_dim == 1
    assert mult == 1
    assert base == generic(e2, "x")
    # adding a translation into the moving coordinate fills the group
    moved = AffineEndo.of(
        endo(e2, [[1, 1], [0, 1]]),
        generic(e2, "p", coeff=endo(e2, [[0, 0], [1, 0]])),
    )
    module, _, _ = predicted_orbit_closure(moved, generic(e2, "x"))
    assert module.is_full()


def test_module_closure_stabilizes():
    e2 = e_power_spec(2)
    sigma = AffineEndo.of(endo(e2, [[1, 1], [0, 1]]))
    w = generic(e2, "p", coeff=endo(e2, [[0, 0], [1, 0]]))
    module = spec_module_closure(sigma, w)
    assert module.is_full()
    assert module.contains(module.image_under(sigma.tau))
