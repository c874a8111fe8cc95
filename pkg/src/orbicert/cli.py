"""Command-line front end: analyze, verify, orbit, normalize.

Exit codes are uniform across subcommands: 0 = computed/verified,
1 = a verification check failed, 2 = invalid input (bad file, schema
violation, digest mismatch, no usable modulus).
"""

import argparse
import sys

from . import oracle
from .engine import analyze
from .errors import ModulusConflict, NonUnipotent, OrbicertError
from .reduction import (
    check_commuting,
    check_dominant,
    lattice_exponent,
    minimalize_generators,
    power_up,
    splitting_subgroups,
    unity_power,
)
from .scenario import (
    canonical_dumps,
    certificate_to_json,
    load_certificate_data,
    parse_certificate,
    parse_scenario,
    report_to_json,
    scenario_digest,
)

DENSE_TRIALS = 40
FIBRATION_PROXY_TRIALS = 16


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise OrbicertError(f"cannot read {path}: {e}") from None


def _emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_scenario(path):
    sc = parse_scenario(_read(path))
    return sc, scenario_digest(sc)


def cmd_analyze(args):
    sc, digest = _load_scenario(args.scenario)
    verdict = analyze(sc.spec, sc.genset)
    payload = certificate_to_json(verdict, digest)
    _emit(canonical_dumps(payload), args.output)
    return 0


def _word_display(names, exponents):
    parts = []
    for name, e in zip(names, exponents):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return "·".join(parts) if parts else "id"


def cmd_normalize(args):
    sc, _ = _load_scenario(args.scenario)
    check_commuting(sc.genset)
    check_dominant(sc.genset)
    lines = []
    n1 = unity_power(sc.genset)
    lines.append(f"unity power n = {n1}")
    powered = power_up(sc.genset, n1)
    split = splitting_subgroups(powered)
    lines.append(
        f"dim B1 = {split.b1.variety_dim}, dim B2 = {split.b2.variety_dim}"
    )
    minimal, vectors = minimalize_generators(powered, split)
    lines.append("minimalized generators:")
    for vec in vectors:
        lines.append(f"  {_word_display(powered.names, vec)}  exponents {list(vec)}")
    n2 = lattice_exponent(vectors)
    lines.append(f"lattice exponent n = {n2}")
    lines.append(f"total power n = {n1 * n2}")
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def _fibration_checks(sc, cert, moduli, seed, bound):
    from .model import quotient_projection_rows

    proj = quotient_projection_rows(cert.c)
    reports = []
    ok = True
    for entry in moduli:
        n = entry["modulus"]
        model = oracle.reduce_mod(sc.spec, sc.genset, n, seed=seed)
        rep = oracle.verify_fibration(
            model,
            proj,
            cert.torsion_multiplier,
            cert.powered_exponent,
            exhaustive_bound=bound,
            seed=seed,
        )
        sampling = oracle.dense_sampling_check(
            model, trials=FIBRATION_PROXY_TRIALS, seed=seed
        )
        checks = [
            {
                "name": "quotient constant on power orbits",
                "ok": rep["ok"],
                "mode": rep["mode"],
                "points": rep["points"],
            },
            {
                "name": "sampled orbits stay in a proper subgroup",
                "ok": sampling["full_rate"] == 0,
                "trials": sampling["trials"],
            },
        ]
        counterexamples = []
        if rep["counterexample"] is not None:
            counterexamples.append(rep["counterexample"])
        reports.append(
            {
                "modulus": n,
                "lift": model.lift,
                "mode": rep["mode"],
                "checks": checks,
                "full_rate": sampling["full_rate"],
                "counterexamples": counterexamples,
                "warnings": entry["warnings"] + list(model.notes),
            }
        )
        ok = ok and all(c["ok"] for c in checks)
    return ok, reports


def _dense_checks(sc, cert, moduli, seed):
    reports = []
    ok = True
    for entry in moduli:
        n = entry["modulus"]
        model = oracle.reduce_mod(sc.spec, sc.genset, n, seed=seed)
        sampling = oracle.dense_sampling_check(model, trials=DENSE_TRIALS, seed=seed)
        match_ok = (
            sampling["module_match_rate"] is None
            or sampling["module_match_rate"] == 1
        )
        checks = [
            {
                "name": "orbit subgroup equals generator-module closure",
                "ok": match_ok,
                "compared": sampling["compared"],
                "truncated": sampling["truncated"],
            }
        ]
        reports.append(
            {
                "modulus": n,
                "lift": model.lift,
                "mode": "sampled",
                "checks": checks,
                "full_rate": sampling["full_rate"],
                "counterexamples": [],
                "warnings": entry["warnings"] + list(model.notes),
            }
        )
        ok = ok and match_ok
    return ok, reports


def cmd_verify(args):
    sc, digest = _load_scenario(args.scenario)
    cert_data = load_certificate_data(_read(args.certificate))
    if cert_data["scenario_digest"] != digest:
        raise OrbicertError(
            f"certificate digest {cert_data['scenario_digest'][:12]}... does not "
            f"match scenario digest {digest[:12]}..."
        )
    cert = parse_certificate(cert_data, sc.spec)
    try:
        moduli, skipped = oracle.moduli_plan(
            cert.bezout_k,
            cert.torsion_multiplier,
            user_moduli=tuple(args.modulus or ()),
        )
    except ModulusConflict as e:
        raise OrbicertError(str(e)) from None

    failures = []
    if cert.verdict == "fibration":
        if cert.c.is_full():
            failures.append("certificate names non-proper subgroup")
            ok, reports = False, []
        else:
            ok, reports = _fibration_checks(
                sc, cert, moduli, args.seed, args.exhaustive_bound
            )
    else:
        if not cert.c.is_full():
            failures.append("dense certificate must name the full group")
            ok, reports = False, []
        else:
            ok, reports = _dense_checks(sc, cert, moduli, args.seed)

    payload = report_to_json(
        {
            "verdict": cert.verdict,
            "scenario_digest": digest,
            "seed": args.seed,
            "ok": ok,
            "failures": failures,
            "moduli": reports,
            "skipped": skipped,
        }
    )
    _emit(canonical_dumps(payload), args.output)
    return 0 if ok else 1


def _resolve_point(arg, model):
    if arg is None:
        return [0] * model.dim
    if arg in model.samples:
        return [int(v) for v in model.samples[arg]]
    try:
        vec = [int(x) for x in arg.split(",")]
    except ValueError:
        raise OrbicertError(
            f"--point must be a declared point name or comma-separated "
            f"integers, got {arg!r}"
        ) from None
    if len(vec) != model.dim:
        raise OrbicertError(f"--point needs {model.dim} coordinates")
    return vec


def cmd_orbit(args):
    sc, _ = _load_scenario(args.scenario)
    n = args.modulus[0] if args.modulus else 7
    model = oracle.reduce_mod(sc.spec, sc.genset, n, seed=args.seed)
    x = _resolve_point(args.point, model)
    lines = [f"modulus {model.modulus} (lift {model.lift})"]
    all_points = []
    for k, name in enumerate(model.names):
        orbit = oracle.iterate_orbit(model, k, x, args.steps)
        lines.append(f"orbit under {name}:")
        for t in range(args.steps + 1):
            coords = ", ".join(str(int(v)) for v in orbit[t])
            lines.append(f"  {t}: ({coords})")
        all_points.extend([int(v) for v in row] for row in orbit)
        try:
            cf = oracle.verify_closed_form(model, k, x, args.steps)
            lines.append(f"closed-form match ({name}): {str(cf['ok']).lower()}")
        except NonUnipotent:
            lines.append(f"closed-form match ({name}): skipped (not unipotent)")
    sub = oracle.orbit_points_subgroup(model, all_points)
    inv = ", ".join(str(v) for v in sub["invariants"]) or "trivial"
    lines.append(f"orbit subgroup invariants: {inv} (order {sub['order']})")
    lines.append(f"full at level {model.modulus}: {str(sub['full_level']).lower()}")
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="orbicert",
        description="Decide fibration-vs-dense for commuting affine "
        "endomorphisms of an abelian variety, and verify the verdicts "
        "on finite torsion models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute a verdict certificate")
    p.add_argument("scenario")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="check a certificate on finite models")
    p.add_argument("scenario")
    p.add_argument("certificate")
    p.add_argument("--modulus", type=int, action="append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive-bound", type=int, default=oracle.EXHAUSTIVE_BOUND)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit", help="print finite-model orbits")
    p.add_argument("scenario")
    p.add_argument("--point", default=None)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--modulus", type=int, action="append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("normalize", help="print the reduction pipeline data")
    p.add_argument("scenario")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_normalize)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OrbicertError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
