"""Exception types shared across the package."""


class OrbicertError(Exception):
    pass


class DimensionMismatch(OrbicertError):
    pass


class ValidationError(OrbicertError):
    """Malformed or semantically invalid input data."""


class NonCommuting(ValidationError):
    """Two declared generators fail to commute (group parts)."""

    def __init__(self, i, j):
        super().__init__(f"generators {i} and {j} do not commute")
        self.i = i
        self.j = j


class NotDominant(ValidationError):
    """A generator's group part is not an isogeny (zero determinant)."""

    def __init__(self, index):
        super().__init__(f"generator {index} is not dominant")
        self.index = index


class UndeclaredGenerator(ValidationError):
    """A translation references a point name with no declaration."""

    def __init__(self, name):
        super().__init__(f"undeclared generic point {name!r}")
        self.name = name


class NormalizationNotApplied(OrbicertError):
    """Unit-root eigenvalues remain; the splitting step was run too early."""


class NotFiniteIndex(OrbicertError):
    """Exponent vectors fail to span a finite-index sublattice."""


class SearchExhausted(OrbicertError):
    """Bounded generator-replacement search found no admissible word."""


class IncompatibleTorsion(OrbicertError):
    """Torsion orders cannot be represented exactly at the requested modulus."""


class ModulusConflict(OrbicertError):
    """Modulus shares a factor with certificate or torsion data."""

    def __init__(self, modulus, reason):
        super().__init__(f"modulus {modulus} skipped: {reason}")
        self.modulus = modulus
        self.reason = reason


class NonUnipotent(OrbicertError):
    """Closed-form orbit requested for a map that is not unipotent."""
