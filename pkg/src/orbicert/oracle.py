"""Brute-force verification of verdicts on finite torsion subgroups.

A finite model realizes the dynamical system on A[M] ≅ (Z/M)^{2g}:
M = lcm(N, declared torsion orders), so every declared torsion point
exists exactly, and each declared generic point is sampled from the
A[N] part of its support lattice, rescaled by M/N.  Everything below
is plain modular arithmetic on integer vectors — none of the symbolic
reduction machinery is trusted here.
"""

import dataclasses
import hashlib
import math
from fractions import Fraction

import numpy as np

from . import _kernel as kernels
from .errors import IncompatibleTorsion, ModulusConflict, NonUnipotent, ValidationError
from .model import (
    AbelianVarietySpec,
    rational_representation_q,
    subgroup_lattice_rows,
)
from .smith import hermite_row_basis, smith_normal_form

DEFAULT_MODULI = (5, 7, 11, 101)
EXHAUSTIVE_BOUND = 10_000_000
SAMPLE_COUNT = 100_000


def _seed_int(*parts):
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(("orbicert:" + text).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _np_rng(*parts):
    return np.random.Generator(np.random.PCG64(_seed_int(*parts)))


def _frac_rows_mod(rows, mod):
    """Reduce a Fraction matrix mod `mod`; denominators must be units."""
    out = []
    for row in rows:
        ints = []
        for x in row:
            x = Fraction(x)
            if x.denominator == 1:
                ints.append(int(x) % mod)
                continue
            try:
                inv = pow(x.denominator, -1, mod)
            except ValueError:
                raise ModulusConflict(
                    mod, f"denominator {x.denominator} is not invertible"
                ) from None
            ints.append(x.numerator * inv % mod)
        out.append(ints)
    return out


def _point_vector_mod(point, samples, mod):
    """Concrete vector of a symbolic point in (Z/mod)^{2g}."""
    dim = point.spec.lattice_rank
    vec = [0] * dim
    for name, coeff in point.terms:
        rep = _frac_rows_mod(rational_representation_q(coeff), mod)
        s = samples[name]
        for i in range(dim):
            acc = 0
            for j in range(dim):
                if rep[i][j] and s[j]:
                    acc += rep[i][j] * int(s[j])
            vec[i] = (vec[i] + acc) % mod
    if point.torsion is not None:
        order, tv = point.torsion
        if mod % order:
            raise ModulusConflict(mod, f"torsion of order {order} has no exact image")
        unit = mod // order
        for i in range(dim):
            vec[i] = (vec[i] + unit * tv[i]) % mod
    return vec


@dataclasses.dataclass(frozen=True, eq=False)
class FiniteModel:
    """Generators realized as affine maps of (Z/lift)^{dim}."""

    spec: AbelianVarietySpec
    modulus: int
    lift: int
    scale: int
    names: tuple[str, ...]
    mats: np.ndarray
    vecs: np.ndarray
    samples: dict
    notes: tuple[str, ...]

    @property
    def dim(self):
        return self.mats.shape[1]

    def point_count(self):
        return self.modulus**self.dim


def reduce_mod(spec, genset, modulus, seed=0, exact=False):
    """Build the finite model of a generator set on A[modulus].

    With exact=True the declared torsion must already live in A[modulus];
    otherwise the model silently lifts to A[lcm(modulus, orders)].
    """
    n = int(modulus)
    if n < 2:
        raise ValidationError("modulus must be at least 2")
    torsion_lcm = 1
    for g in genset.gens:
        t = g.translation.torsion_order
        torsion_lcm = torsion_lcm * t // math.gcd(torsion_lcm, t)
    lift = n * torsion_lcm // math.gcd(n, torsion_lcm)
    if exact and lift != n:
        raise IncompatibleTorsion(
            f"declared torsion needs level {lift}, not {n}"
        )
    dim = spec.lattice_rank
    if (dim + 1) * lift * lift >= 2**62:
        raise ValidationError(f"modulus {n} too large for int64 kernels")
    scale = lift // n
    notes = []
    if lift != n:
        notes.append(f"lifted to A[{lift}] for declared torsion")
    if math.gcd(scale, n) != 1:
        notes.append(f"lift shares a factor with {n}; level-{n} rates unreliable")

    supports = {}
    for g in genset.gens:
        for name, sub in g.translation.supports:
            if name in supports and supports[name] != sub:
                raise ValidationError(f"conflicting supports for {name!r}")
            supports[name] = sub
    rng = _np_rng(seed, n, "samples")
    samples = {}
    for name in sorted(supports):
        rows = subgroup_lattice_rows(supports[name])
        u = [0] * dim
        for row in rows:
            c = int(rng.integers(0, n))
            for i in range(dim):
                u[i] = (u[i] + c * row[i]) % n
        samples[name] = tuple(x * scale % lift for x in u)

    mats = np.zeros((len(genset.gens), dim, dim), dtype=np.int64)
    vecs = np.zeros((len(genset.gens), dim), dtype=np.int64)
    for k, g in enumerate(genset.gens):
        mats[k] = np.array(
            _frac_rows_mod(rational_representation_q(g.tau), lift), dtype=np.int64
        )
        vecs[k] = np.array(
            _point_vector_mod(g.translation, samples, lift), dtype=np.int64
        )
    return FiniteModel(
        spec=spec,
        modulus=n,
        lift=lift,
        scale=scale,
        names=tuple(genset.names),
        mats=mats,
        vecs=vecs,
        samples=samples,
        notes=tuple(notes),
    )


def iterate_orbit(model, gen_index, x, steps):
    x = np.asarray(x, dtype=np.int64)
    return kernels.orbit_iterate(
        model.mats[gen_index], model.vecs[gen_index], x, steps, model.lift
    )


class SubgroupAccumulator:
    """Canonical Hermite basis of a subgroup of (Z/mod)^dim.

    Maintains the integer lattice between mod·Z^dim and Z^dim spanned by
    the rows added so far; the basis is square and upper triangular, so
    membership tests and growth checks stay cheap inside search loops.
    """

    def __init__(self, mod, dim):
        self.mod = mod
        self.dim = dim
        self.rows = [[mod if i == j else 0 for j in range(dim)] for i in range(dim)]

    def contains(self, vec):
        r = [int(x) % self.mod for x in vec]
        for i in range(self.dim):
            piv = self.rows[i][i]
            q, rem = divmod(r[i], piv)
            if rem:
                return False
            if q:
                for j in range(i, self.dim):
                    r[j] -= q * self.rows[i][j]
        return True

    def add(self, vec):
        """Fold a vector in; returns True when the subgroup grew."""
        if self.contains(vec):
            return False
        stacked = self.rows + [[int(x) % self.mod for x in vec]]
        self.rows = [list(r) for r in hermite_row_basis(stacked)]
        return True

    def index(self):
        out = 1
        for i in range(self.dim):
            out *= self.rows[i][i]
        return out

    def order(self):
        return self.mod**self.dim // self.index()

    def is_full(self):
        return all(self.rows[i][i] == 1 for i in range(self.dim))

    def invariants(self):
        _, d, _, _, _ = smith_normal_form(self.rows)
        out = []
        for i in range(self.dim):
            q = self.mod // d[i][i]
            if q > 1:
                out.append(q)
        return tuple(sorted(out))

    def canonical_rows(self):
        return tuple(tuple(r) for r in self.rows)


def orbit_points_subgroup(model, points):
    """Subgroup of A[lift] generated by differences of the given points,
    plus its image at the torsion level below the lift."""
    acc = SubgroupAccumulator(model.lift, model.dim)
    acc_n = SubgroupAccumulator(model.modulus, model.dim)
    base = [int(x) for x in points[0]]
    for p in points[1:]:
        diff = [(int(a) - b) % model.lift for a, b in zip(p, base)]
        acc.add(diff)
        acc_n.add(diff)
    return {
        "order": acc.order(),
        "invariants": acc.invariants(),
        "full_lift": acc.is_full(),
        "full_level": acc_n.is_full(),
        "rows": acc.canonical_rows(),
    }


def _affine_power_mod(mat, vec, n, mod):
    """(R, w) with R x + w = sigma^n(x) mod `mod`, by pair squaring."""
    d = mat.shape[0]
    res_r = np.eye(d, dtype=np.int64)
    res_w = np.zeros(d, dtype=np.int64)
    base_r = mat % mod
    base_w = vec % mod
    k = int(n)
    while k:
        if k & 1:
            res_w = (base_r @ res_w + base_w) % mod
            res_r = (base_r @ res_r) % mod
        k >>= 1
        base_w = (base_r @ base_w + base_w) % mod
        base_r = (base_r @ base_r) % mod
    return res_r, res_w


def verify_fibration(
    model,
    proj_rows,
    multiplier,
    exponent,
    exhaustive_bound=EXHAUSTIVE_BOUND,
    sample_count=SAMPLE_COUNT,
    seed=0,
):
    """Check that mult * proj is constant along every generator power orbit.

    Exhausts all of A[modulus] when its cardinality fits the bound and
    falls back to seeded uniform sampling otherwise.  Returns a report
    with the first counterexample, if any.
    """
    if not proj_rows:
        raise ValidationError("projection must have at least one row")
    if int(exponent) < 1 or int(multiplier) < 1:
        raise ValidationError("certificate exponent and multiplier must be >= 1")
    mod = model.lift
    proj = np.array([[int(x) % mod for x in row] for row in proj_rows], dtype=np.int64)
    mult = int(multiplier) % mod
    mats = np.empty_like(model.mats)
    vecs = np.empty_like(model.vecs)
    for k in range(model.mats.shape[0]):
        mats[k], vecs[k] = _affine_power_mod(
            model.mats[k], model.vecs[k], exponent, mod
        )
    count = model.point_count()
    if count <= exhaustive_bound:
        mode = "exhaustive"
        checked = count
        hit = kernels.invariance_scan_range(
            mats, vecs, proj, mult, mod, model.scale, model.modulus, 0, count
        )
        point = _index_point(model, hit) if hit >= 0 else None
    else:
        mode = "sampled"
        checked = int(sample_count)
        rng = _np_rng(seed, model.modulus, "verify")
        pts = (
            rng.integers(0, model.modulus, size=(checked, model.dim), dtype=np.int64)
            * model.scale
            % mod
        )
        hit = kernels.invariance_scan_points(mats, vecs, proj, mult, mod, pts)
        point = [int(x) for x in pts[hit]] if hit >= 0 else None
    out = {
        "mode": mode,
        "points": checked,
        "modulus": model.modulus,
        "lift": model.lift,
        "exponent": int(exponent),
        "multiplier": int(multiplier),
        "ok": hit < 0,
        "counterexample": None,
    }
    if hit >= 0:
        out["counterexample"] = _describe_violation(
            model, mats, vecs, proj, mult, point
        )
    return out


def _index_point(model, index):
    digits = []
    rem = int(index)
    for _ in range(model.dim):
        digits.append(rem % model.modulus * model.scale % model.lift)
        rem //= model.modulus
    return digits


def _describe_violation(model, mats, vecs, proj, mult, point):
    mod = model.lift
    x = np.array(point, dtype=np.int64)
    px = (proj @ x % mod) * mult % mod
    for k, name in enumerate(model.names):
        y = (mats[k] @ x + vecs[k]) % mod
        py = (proj @ y % mod) * mult % mod
        if (py != px).any():
            return {
                "point": [int(v) for v in x],
                "generator": name,
                "before": [int(v) for v in px],
                "after": [int(v) for v in py],
            }
    raise AssertionError("kernel reported a violation the recheck cannot see")


def verify_closed_form(model, gen_index, x, n_max):
    """Compare the orbit with x + sum_j C(n,j) beta^{j-1}(beta x + y).

    Requires the generator to be unipotent mod the lift; beta = tau - id.
    """
    mod = model.lift
    d = model.dim
    mat = model.mats[gen_index]
    vec = model.vecs[gen_index]
    beta = (mat - np.eye(d, dtype=np.int64)) % mod
    nil = beta.copy()
    for _ in range(d - 1):
        if not nil.any():
            break
        nil = nil @ beta % mod
    if nil.any():
        raise NonUnipotent(f"generator {model.names[gen_index]} is not unipotent mod {mod}")
    x = np.asarray(x, dtype=np.int64) % mod
    w = (beta @ x + vec) % mod
    terms = [w]
    for _ in range(d - 1):
        terms.append(beta @ terms[-1] % mod)
    terms = np.array(terms, dtype=np.int64)
    orbit = kernels.orbit_iterate(mat, vec, x, n_max, mod)
    for n in range(n_max + 1):
        coeffs = np.array(
            [math.comb(n, j + 1) % mod for j in range(d)], dtype=np.int64
        )
        predicted = (x + coeffs @ terms) % mod
        if (predicted != orbit[n]).any():
            return {"ok": False, "first_mismatch": n, "steps": n_max}
    return {"ok": True, "first_mismatch": None, "steps": n_max}


def _module_closure(model, acc):
    """Grow a subgroup until it is stable under every generator matrix."""
    mod = model.lift
    changed = True
    while changed:
        changed = False
        for k in range(model.mats.shape[0]):
            mat = model.mats[k]
            for row in [list(r) for r in acc.rows]:
                img = [
                    sum(int(mat[i, j]) * row[j] for j in range(model.dim)) % mod
                    for i in range(model.dim)
                ]
                if acc.add(img):
                    changed = True
    return acc


def dense_sampling_check(model, trials, seed=0, depth_cap=12, point_cap=4096):
    """Breadth-first orbit exploration from random generic starts.

    Tracks, per trial, whether the orbit differences generate all of
    the level-N torsion, and cross-checks the reached subgroup against
    the generator-module closure of the first-step differences (the two
    agree whenever the search was not truncated by the caps).
    """
    mod = model.lift
    full = 0
    matches = 0
    compared = 0
    truncated = 0
    invariant_counts = {}
    for t in range(int(trials)):
        rng = _np_rng(seed, model.modulus, "dense", t)
        x0 = (
            rng.integers(0, model.modulus, size=model.dim, dtype=np.int64)
            * model.scale
            % mod
        )
        acc = SubgroupAccumulator(mod, model.dim)
        acc_n = SubgroupAccumulator(model.modulus, model.dim)
        seen = {tuple(int(v) for v in x0)}
        frontier = [x0]
        depth = 0
        capped = False
        while frontier and not acc.is_full():
            if depth >= depth_cap or len(seen) >= point_cap:
                capped = True
                break
            batch = np.array(frontier, dtype=np.int64)
            fresh = []
            for k in range(model.mats.shape[0]):
                imgs = kernels.apply_batch(model.mats[k], model.vecs[k], batch, mod)
                for row in imgs:
                    key = tuple(int(v) for v in row)
                    if key in seen:
                        continue
                    seen.add(key)
                    fresh.append(np.array(key, dtype=np.int64))
                    diff = [(a - int(b)) % mod for a, b in zip(key, x0)]
                    acc.add(diff)
                    acc_n.add(diff)
            frontier = fresh
            depth += 1
        if acc_n.is_full():
            full += 1
        inv = acc_n.invariants()
        invariant_counts[inv] = invariant_counts.get(inv, 0) + 1
        if capped and not acc.is_full():
            truncated += 1
        else:
            module = SubgroupAccumulator(mod, model.dim)
            for k in range(model.mats.shape[0]):
                step = kernels.apply_batch(
                    model.mats[k], model.vecs[k], x0.reshape(1, -1), mod
                )[0]
                module.add([(int(a) - int(b)) % mod for a, b in zip(step, x0)])
            _module_closure(model, module)
            compared += 1
            if module.canonical_rows() == acc.canonical_rows():
                matches += 1
    return {
        "trials": int(trials),
        "modulus": model.modulus,
        "lift": model.lift,
        "full_rate": Fraction(full, trials) if trials else Fraction(0),
        "module_match_rate": Fraction(matches, compared) if compared else None,
        "compared": compared,
        "truncated": truncated,
        "invariants": sorted(
            (list(k), v) for k, v in invariant_counts.items()
        ),
    }


def moduli_plan(bezout_k, torsion_multiplier, user_moduli=(), defaults=DEFAULT_MODULI):
    """Select torsion levels for verification.

    Default levels sharing a factor with the certificate data are skipped
    (the multiplier or the denominator scale would collapse there); levels
    the user asked for explicitly are kept, with a warning attached.
    """
    obstruction = abs(int(bezout_k)) * abs(int(torsion_multiplier))
    plan = []
    skipped = []
    if user_moduli:
        for n in user_moduli:
            warnings = []
            if math.gcd(int(n), obstruction) != 1:
                warnings.append(
                    f"level {n} shares a factor with the certificate "
                    f"(k={bezout_k}, m={torsion_multiplier})"
                )
            plan.append({"modulus": int(n), "source": "user", "warnings": warnings})
        return plan, skipped
    for n in defaults:
        if math.gcd(int(n), obstruction) != 1:
            skipped.append(
                {
                    "modulus": int(n),
                    "reason": f"shares a factor with k={bezout_k} or m={torsion_multiplier}",
                }
            )
            continue
        plan.append({"modulus": int(n), "source": "default", "warnings": []})
    if not plan:
        raise ModulusConflict(0, "no default level is coprime to the certificate")
    return plan, skipped
