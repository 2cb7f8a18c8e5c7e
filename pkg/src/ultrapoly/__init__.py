"""Exact non-Archimedean polyhedral expansions of finite ultrametric spaces.

The pipeline: ingest a finite ultrametric space (or make one from raw
dissimilarities via the subdominant closure), round its distances into
the value group {p^k} of a p-adic field, cover it by nested clopen
balls, span nerve complexes over the covers, assemble them into an
inverse system with non-stretching simplicial bonding maps, reconstruct
the space from threads of the system, and project everything through
the digit-reading quotient onto real interval shadows with the same
dimensions.  All arithmetic is exact: integers, fractions, and
exponent-encoded norms; no floats anywhere.
"""

from .padic import (
    GAMMA_ZERO,
    GammaValue,
    NotPrimeError,
    PAdic,
    PrimeMismatchError,
    padic_add,
    padic_norm,
    round_to_gamma,
)
from .spaces import (
    AsymmetricMatrixError,
    BaireCodes,
    C0Vector,
    MatrixShapeError,
    NegativeDistanceError,
    NonzeroDiagonalError,
    NotUltrametricError,
    UltraSpace,
    UnseparatedSpaceError,
    baire_encode,
    c0_embed,
    quotient_zero,
    round_space,
    space_from_points,
    subdominant_closure,
    validate_ultrametric,
)
from .nerve import (
    NerveComplex,
    NestingError,
    Realization,
    ScaleCover,
    ThresholdError,
    build_nerve,
    check_uniform,
    cover_tower,
    isolated_point_check,
    nerve_to_dot,
    realize,
    scale_cover,
    subdivide,
)
from .spectrum import (
    BondingMap,
    Expansion,
    IncoherentThreadError,
    Schedule,
    ScheduleError,
    SeparationError,
    Thread,
    assemble_expansion,
    bonding_map,
    group_expansion,
    limit_isometry_check,
    reconstruct,
    residue_space,
    thread,
    verify_nondegenerate,
    verify_nonstretching,
)
from .shadow import (
    BoundaryPair,
    RealSimplex,
    ShadowBonding,
    ShadowComplex,
    shadow_bonding,
    shadow_bundle,
    shadow_complex,
    shadow_expansion,
    theta,
    theta_boundary_pairs,
    theta_nonstretch_check,
    theta_table_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
