"""JSON formats: scenarios, certificates, verification reports.

Numbers in every payload are arbitrary-precision integers, or exact
rationals written as strings "p/q"; nothing is ever rounded.  All
serialization is canonical (sorted keys, fixed indentation), so a
content digest of a scenario is well defined and certificates can pin
the exact monoid they were computed for.
"""

import dataclasses
import hashlib
import json
from fractions import Fraction

import jsonschema

from .errors import UndeclaredGenerator, ValidationError
from .linalg import ExactMatrix, Subspace
from .model import (
    AbelianVarietySpec,
    AffineEndo,
    ConnectedSubgroup,
    EndoMatrix,
    Factor,
    SymbolicPoint,
)
from .orders import RingSpec
from .reduction import GeneratorSet

_RATIONAL = {
    "anyOf": [
        {"type": "integer"},
        {"type": "string", "pattern": "^-?[0-9]+(/-?[0-9]+)?$"},
    ]
}
_COORDS = {"type": "array", "items": _RATIONAL}
_ENTRY_MATRIX = {"type": "array", "items": {"type": "array", "items": _COORDS}}
_SUBGROUP = {"type": "array", "items": {"type": "array", "items": _COORDS}}
_INT_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["factors", "generators"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "factors": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "dim", "endo_ring", "multiplicity"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "dim": {"type": "integer", "minimum": 1},
                    "multiplicity": {"type": "integer", "minimum": 0},
                    "endo_ring": {
                        "type": "object",
                        "required": ["basis", "mul_table", "lattice_rep"],
                        "additionalProperties": False,
                        "properties": {
                            "basis": {
                                "type": "array",
                                "minItems": 1,
                                "items": {"type": "string"},
                            },
                            "mul_table": {
                                "type": "array",
                                "items": {
                                    "type": "array",
                                    "items": {
                                        "type": "array",
                                        "items": {"type": "integer"},
                                    },
                                },
                            },
                            "lattice_rep": {"type": "array", "items": _INT_MATRIX},
                        },
                    },
                },
            },
        },
        "generators": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["tau"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "tau": {"type": "array", "items": _ENTRY_MATRIX},
                    "translation": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "terms": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["point"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "point": {"type": "string"},
                                        "coeff": {
                                            "type": "array",
                                            "items": _ENTRY_MATRIX,
                                        },
                                    },
                                },
                            },
                            "torsion_terms": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["order", "vector"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "order": {"type": "integer", "minimum": 1},
                                        "vector": {
                                            "type": "array",
                                            "items": {"type": "integer"},
                                        },
                                    },
                                },
                            },
                            "supports": {
                                "type": "array",
                                "items": {"type": "string"},
                            },
                        },
                    },
                },
            },
        },
        "declared_points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "support": {
                        "anyOf": [{"type": "null"}, {"type": "array", "items": _SUBGROUP}]
                    },
                },
            },
        },
    },
}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": [
        "verdict",
        "scenario_digest",
        "C",
        "torsion_multiplier",
        "powered_exponent",
        "bezout_k",
        "witness_constraints",
        "reduction_log",
    ],
    "additionalProperties": False,
    "properties": {
        "verdict": {"enum": ["fibration", "dense"]},
        "scenario_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "C": {"type": "array", "items": _SUBGROUP},
        "torsion_multiplier": {"type": "integer", "minimum": 1},
        "powered_exponent": {"type": "integer", "minimum": 1},
        "bezout_k": {"type": "integer"},
        "witness_constraints": {"type": "array", "items": {"type": "object"}},
        "reduction_log": {"type": "array", "items": {"type": "object"}},
    },
}


def rational_to_json(q):
    q = Fraction(q)
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_json(v):
    if isinstance(v, bool):
        raise ValidationError("booleans are not numbers here")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"bad rational {v!r}: {e}") from None
    raise ValidationError(f"expected integer or 'p/q' string, got {type(v).__name__}")


def canonical_dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _json_sanitize(value):
    if isinstance(value, Fraction):
        return rational_to_json(value)
    if isinstance(value, dict):
        return {str(k): _json_sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_sanitize(v) for v in value]
    return value


def _schema_check(data, schema, what):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "/" + "/".join(str(p) for p in e.absolute_path)
        raise ValidationError(f"{what} schema violation at {path}: {e.message}")


@dataclasses.dataclass(frozen=True)
class Scenario:
    """Parsed scenario: variety, generator set, declared generic points."""

    spec: AbelianVarietySpec
    genset: GeneratorSet
    points: tuple[tuple[str, ConnectedSubgroup], ...]
    name: str | None = None


def _ring_to_json(ring: RingSpec):
    return {
        "basis": list(ring.basis_names),
        "mul_table": [[list(cell) for cell in row] for row in ring.mul_table],
        "lattice_rep": [[list(row) for row in mat] for mat in ring.lattice_rep],
    }


def _ring_from_json(data):
    return RingSpec.create(data["basis"], data["mul_table"], data["lattice_rep"])


def _entry_to_json(entry):
    return [rational_to_json(c) for c in entry.coords]


def _blocks_to_json(endo: EndoMatrix):
    return [
        [[_entry_to_json(e) for e in row] for row in block.rows]
        for block in endo.blocks
    ]


def _blocks_from_json(spec, data, where):
    if len(data) != len(spec.factors):
        raise ValidationError(f"{where}: one block per factor expected")
    blocks = []
    for f, rows in zip(spec.factors, data):
        k = f.multiplicity
        if len(rows) != k or any(len(r) != k for r in rows):
            raise ValidationError(f"{where}: block for {f.name} must be {k}x{k}")
        ring = f.ring
        out_rows = []
        for r in rows:
            entries = []
            for cell in r:
                entries.append(ring.element([rational_from_json(c) for c in cell]))
            out_rows.append(entries)
        blocks.append(
            ExactMatrix.from_rows(ring, out_rows)
            if k
            else ExactMatrix.zeros(ring, 0, 0)
        )
    return EndoMatrix.from_blocks(spec, blocks)


def subgroup_to_json(c: ConnectedSubgroup):
    return [
        [[_entry_to_json(e) for e in row] for row in part.rows] for part in c.parts
    ]


def subgroup_from_json(spec, data, where):
    if len(data) != len(spec.factors):
        raise ValidationError(f"{where}: one part per factor expected")
    parts = []
    for f, rows in zip(spec.factors, data):
        ring = f.ring
        vectors = []
        for r in rows:
            if len(r) != f.multiplicity:
                raise ValidationError(
                    f"{where}: rows for {f.name} must have length {f.multiplicity}"
                )
            vectors.append(
                tuple(
                    ring.element([rational_from_json(c) for c in cell]) for cell in r
                )
            )
        parts.append(Subspace.span(ring, f.multiplicity, vectors))
    return ConnectedSubgroup.from_parts(spec, parts)


def parse_scenario(data):
    """Parse and validate a scenario dict (or JSON text)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ValidationError(f"scenario is not valid JSON: {e}") from None
    _schema_check(data, SCENARIO_SCHEMA, "scenario")
    factors = []
    for i, fd in enumerate(data["factors"]):
        ring = _ring_from_json(fd["endo_ring"])
        if ring.factor_dim != fd["dim"]:
            raise ValidationError(
                f"/factors/{i}: dim {fd['dim']} does not match the "
                f"lattice rank {ring.lattice_rank} of the ring"
            )
        factors.append(Factor(fd["name"], ring, fd["multiplicity"]))
    spec = AbelianVarietySpec.create(factors)

    support_map = {}
    declared = data.get("declared_points", [])
    for i, pd in enumerate(declared):
        pname = pd["name"]
        if pname in support_map:
            raise ValidationError(f"/declared_points/{i}: duplicate point {pname!r}")
        sup = pd.get("support")
        if sup is None:
            support_map[pname] = spec.full_group()
        else:
            support_map[pname] = subgroup_from_json(
                spec, sup, f"/declared_points/{i}/support"
            )

    names = []
    gens = []
    for i, gd in enumerate(data["generators"]):
        gname = gd.get("name", f"g{i + 1}")
        if gname in names:
            raise ValidationError(f"/generators/{i}: duplicate generator {gname!r}")
        tau = _blocks_from_json(spec, gd["tau"], f"/generators/{i}/tau")
        td = gd.get("translation", {})
        terms = []
        for j, term in enumerate(td.get("terms", [])):
            pname = term["point"]
            if pname not in support_map:
                raise UndeclaredGenerator(pname)
            coeff = (
                _blocks_from_json(
                    spec, term["coeff"], f"/generators/{i}/translation/terms/{j}/coeff"
                )
                if "coeff" in term
                else spec.endo_identity()
            )
            terms.append((pname, coeff))
        for pname in td.get("supports", []):
            if pname not in support_map:
                raise UndeclaredGenerator(pname)
        torsion_terms = [
            (t["order"], tuple(t["vector"])) for t in td.get("torsion_terms", [])
        ]
        translation = SymbolicPoint.make(
            spec,
            terms,
            torsion_terms,
            [(n, support_map[n]) for n in support_map],
        )
        names.append(gname)
        gens.append(AffineEndo.of(tau, translation))
    genset = GeneratorSet.create(spec, tuple(names), tuple(gens))
    points = tuple((n, support_map[n]) for n in sorted(support_map))
    return Scenario(spec=spec, genset=genset, points=points, name=data.get("name"))


def serialize_scenario(sc: Scenario):
    """Canonical scenario dict; parse(serialize(s)) is stable."""
    out = {
        "factors": [
            {
                "name": f.name,
                "dim": f.ring.factor_dim,
                "multiplicity": f.multiplicity,
                "endo_ring": _ring_to_json(f.ring),
            }
            for f in sc.spec.factors
        ],
        "generators": [],
        "declared_points": [
            {
                "name": name,
                "support": None if sup.is_full() else subgroup_to_json(sup),
            }
            for name, sup in sc.points
        ],
    }
    if sc.name is not None:
        out["name"] = sc.name
    for name, g in zip(sc.genset.names, sc.genset.gens):
        entry = {"name": name, "tau": _blocks_to_json(g.tau)}
        tr = g.translation
        td = {}
        if tr.terms:
            td["terms"] = [
                {"point": pname, "coeff": _blocks_to_json(coeff)}
                for pname, coeff in tr.terms
            ]
            td["supports"] = sorted(pname for pname, _ in tr.supports)
        if tr.torsion is not None:
            td["torsion_terms"] = [
                {"order": tr.torsion[0], "vector": list(tr.torsion[1])}
            ]
        if td:
            entry["translation"] = td
        out["generators"].append(entry)
    return out


def scenario_digest(sc: Scenario):
    text = canonical_dumps(serialize_scenario(sc))
    return hashlib.sha256(text.encode()).hexdigest()


def certificate_to_json(verdict, digest):
    """Certificate payload for a Verdict, pinned to a scenario digest."""
    constraints = []
    if verdict.witness is not None:
        w = verdict.witness
        constraints.append(
            {
                "kind": "splitting",
                "statement": "A = B1 + B2 with B1 co-unipotent and B2 unipotent",
                "b1": subgroup_to_json(w.b1),
                "b2": subgroup_to_json(w.b2),
            }
        )
        for gname, target in w.targets:
            constraints.append(
                {
                    "kind": "target",
                    "generator": gname,
                    "subgroup": subgroup_to_json(target),
                }
            )
        constraints.extend(dict(c) for c in w.constraints)
    return _json_sanitize(
        {
            "verdict": verdict.kind,
            "scenario_digest": digest,
            "C": subgroup_to_json(verdict.c),
            "torsion_multiplier": verdict.torsion_multiplier,
            "powered_exponent": verdict.powered_exponent,
            "bezout_k": verdict.bezout_k,
            "witness_constraints": constraints,
            "reduction_log": [dict(entry) for entry in verdict.reduction_log],
        }
    )


@dataclasses.dataclass(frozen=True)
class ParsedCertificate:
    verdict: str
    scenario_digest: str
    c: ConnectedSubgroup
    torsion_multiplier: int
    powered_exponent: int
    bezout_k: int
    witness_constraints: tuple[dict, ...]


def load_certificate_data(data):
    """JSON-decode and schema-check a certificate without a variety spec."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ValidationError(f"certificate is not valid JSON: {e}") from None
    _schema_check(data, CERTIFICATE_SCHEMA, "certificate")
    return data


def parse_certificate(data, spec):
    data = load_certificate_data(data)
    c = subgroup_from_json(spec, data["C"], "/C")
    return ParsedCertificate(
        verdict=data["verdict"],
        scenario_digest=data["scenario_digest"],
        c=c,
        torsion_multiplier=data["torsion_multiplier"],
        powered_exponent=data["powered_exponent"],
        bezout_k=data["bezout_k"],
        witness_constraints=tuple(data["witness_constraints"]),
    )


def report_to_json(report):
    """Sanitize a verification report (Fractions become 'p/q' strings)."""
    return _json_sanitize(report)
