"""Exact dichotomy certificates for commuting affine endomorphisms of
abelian varieties: every monoid either preserves a non-constant fibration
or has a dense orbit, and both outcomes are checkable on finite torsion
models."""

from .engine import Verdict, analyze, analyze_cyclic, analyze_monoid
from .errors import (
    DimensionMismatch,
    IncompatibleTorsion,
    ModulusConflict,
    NonCommuting,
    NonUnipotent,
    NormalizationNotApplied,
    NotDominant,
    NotFiniteIndex,
    OrbicertError,
    SearchExhausted,
    UndeclaredGenerator,
    ValidationError,
)
from .model import (
    AbelianVarietySpec,
    AffineEndo,
    ConnectedSubgroup,
    DenseWitnessSpec,
    EndoMatrix,
    Factor,
    FibrationCertificate,
    SymbolicPoint,
)
from .oracle import FiniteModel, reduce_mod, verify_closed_form, verify_fibration
from .orders import RingSpec, gaussian_ring, integer_ring, quadratic_ring
from .reduction import GeneratorSet
from .scenario import Scenario, parse_scenario, scenario_digest, serialize_scenario

__version__ = "0.1.0"

__all__ = [
    "AbelianVarietySpec",
    "AffineEndo",
    "ConnectedSubgroup",
    "DenseWitnessSpec",
    "DimensionMismatch",
    "EndoMatrix",
    "Factor",
    "FibrationCertificate",
    "FiniteModel",
    "GeneratorSet",
    "IncompatibleTorsion",
    "ModulusConflict",
    "NonCommuting",
    "NonUnipotent",
    "NormalizationNotApplied",
    "NotDominant",
    "NotFiniteIndex",
    "OrbicertError",
    "RingSpec",
    "Scenario",
    "SearchExhausted",
    "SymbolicPoint",
    "UndeclaredGenerator",
    "ValidationError",
    "Verdict",
    "analyze",
    "analyze_cyclic",
    "analyze_monoid",
    "gaussian_ring",
    "integer_ring",
    "parse_scenario",
    "quadratic_ring",
    "reduce_mod",
    "scenario_digest",
    "serialize_scenario",
    "verify_closed_form",
    "verify_fibration",
]
