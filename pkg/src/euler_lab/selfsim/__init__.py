"""Self-similar profile analysis: exact families, residual systems, reconstruction and classification."""

from euler_lab.selfsim.classify import FAMILY_A, FAMILY_B, NOT_SOLUTION, Classification, SampleGeometryError, classify
from euler_lab.selfsim.collapse import (
    Extraction,
    FrozenSnapshot,
    SelfSimilarFields,
    extract_profiles,
    reconstruct_fields,
)
from euler_lab.selfsim.profiles import (
    ZERO,
    AnalyticProfileSet,
    GridProfileSet,
    Polynomial,
    ProfileSet,
    ProfileValues,
    RadialPowerLaw,
    Term,
    constant,
    default_lattice,
    family_a,
    family_b,
    family_b_exponent,
    lattice_points,
    profile_from_tag,
    sample_profiles,
)
from euler_lab.selfsim.residuals import (
    EquationResidual,
    ResidualReport,
    residual_group1,
    residual_group2,
    residual_timedependent,
)

__all__ = [
    "FAMILY_A",
    "FAMILY_B",
    "NOT_SOLUTION",
    "ZERO",
    "AnalyticProfileSet",
    "Classification",
    "EquationResidual",
    "Extraction",
    "FrozenSnapshot",
    "GridProfileSet",
    "Polynomial",
    "ProfileSet",
    "ProfileValues",
    "RadialPowerLaw",
    "ResidualReport",
    "SampleGeometryError",
    "SelfSimilarFields",
    "Term",
    "classify",
    "constant",
    "default_lattice",
    "extract_profiles",
    "family_a",
    "family_b",
    "family_b_exponent",
    "lattice_points",
    "profile_from_tag",
    "reconstruct_fields",
    "residual_group1",
    "residual_group2",
    "residual_timedependent",
    "sample_profiles",
]
