"""Exact-arithmetic asymptotic iteration for spin-boson spectra.

The package keeps every symbolic step (bivariate polynomials, rational
functions, the iteration recursion, quantization polynomials) in exact
rational arithmetic and crosses to floating point only when extracting
polynomial roots, which it does at extended precision because the
quantization polynomials carry tightly clustered root families.
"""

from .exact_algebra import (
    BiPoly,
    DegreeZero,
    Rat,
    RatFunc,
    UniPolyE,
    ZeroPolynomial,
    bipoly_arith,
    bipoly_derive_z,
    poly_real_roots,
    rat,
    ratfunc_arith,
    ratfunc_derive_z,
    ratfunc_eval_numer_at,
)
from .model_catalog import (
    BadPattern,
    CoeffQuartet,
    ComplexEnergy,
    ConstraintViolation,
    DiracLevel,
    ModelSpec,
    SingularSystem,
    SymmetryClass,
    ValidationResult,
    ZeroFrequency,
    closed_form_dirac,
    closed_form_jc,
    closed_form_mjc,
    reduce_to_coupled_ode,
    rescaled_seed,
    seed_jc,
    seed_jt,
    seed_rashba,
    validate_model,
)
from .aim_engine import (
    AimRow,
    Decoupled,
    DeltaPair,
    DomainError,
    IdenticallyZero,
    Level,
    NoRealRoots,
    NotPolynomial,
    PolyEigenfunction,
    SpectrumResult,
    aim_step,
    assemble_wavefunction,
    delta_at,
    initial_row,
    polynomial_eigenfunction,
    solve_spectrum,
)

__version__ = "1.0.0"

__all__ = [
    "BiPoly", "RatFunc", "UniPolyE", "Rat", "rat",
    "ZeroPolynomial", "DegreeZero",
    "bipoly_arith", "bipoly_derive_z",
    "ratfunc_arith", "ratfunc_derive_z", "ratfunc_eval_numer_at",
    "poly_real_roots",
    "ModelSpec", "CoeffQuartet", "SymmetryClass", "ValidationResult",
    "DiracLevel", "BadPattern", "ZeroFrequency", "SingularSystem",
    "ConstraintViolation", "ComplexEnergy",
    "validate_model", "seed_jt", "seed_rashba", "seed_jc", "rescaled_seed",
    "reduce_to_coupled_ode",
    "closed_form_jc", "closed_form_mjc", "closed_form_dirac",
    "AimRow", "DeltaPair", "Level", "SpectrumResult", "PolyEigenfunction",
    "NoRealRoots", "Decoupled", "IdenticallyZero", "NotPolynomial",
    "DomainError",
    "initial_row", "aim_step", "delta_at", "solve_spectrum",
    "polynomial_eigenfunction", "assemble_wavefunction",
    "__version__",
]
