"""Exact linear algebra and Hodge-theoretic computations for degenerating variations."""

from .hodge import (
    HodgeError,
    HodgeStructure,
    MixedHodgeStructure,
    PolarizedLattice,
    deligne_bigrading,
    hodge_gram,
    is_mhs,
    is_polarization,
)
from .linalg import Filtration, Grading, Matrix, Subspace, decreasing, increasing
from .locus import (
    HodgeClassHit,
    LocusSystem,
    enumerate_classes,
    locus_equations,
    monodromy_fixes,
    near_class_test,
    orbit_locus_solve,
    project_nearby,
    verify_thm25,
)
from .nilpotent import (
    cone_weight_filtration,
    polarization_compatible_grading,
    relative_weight_filtration,
    splitting_grading,
    weight_filtration,
)
from .orbits import NilpotentOrbit, VariationSample, evaluate_orbit, evaluate_variation, limiting_mhs
from .scalars import COMPLEX, GAUSSIAN, RATIONAL, GaussianRational
from .sl2 import SL2Rep

__version__ = "0.1.0"

__all__ = [
    "COMPLEX",
    "GAUSSIAN",
    "RATIONAL",
    "Filtration",
    "GaussianRational",
    "Grading",
    "HodgeClassHit",
    "HodgeError",
    "HodgeStructure",
    "LocusSystem",
    "Matrix",
    "MixedHodgeStructure",
    "NilpotentOrbit",
    "PolarizedLattice",
    "SL2Rep",
    "Subspace",
    "VariationSample",
    "cone_weight_filtration",
    "decreasing",
    "deligne_bigrading",
    "enumerate_classes",
    "evaluate_orbit",
    "evaluate_variation",
    "hodge_gram",
    "increasing",
    "is_mhs",
    "is_polarization",
    "limiting_mhs",
    "locus_equations",
    "monodromy_fixes",
    "near_class_test",
    "orbit_locus_solve",
    "polarization_compatible_grading",
    "project_nearby",
    "relative_weight_filtration",
    "splitting_grading",
    "verify_thm25",
    "weight_filtration",
]
