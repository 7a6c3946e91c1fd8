"""Frieze sequences of affine quivers and the linear recurrences they satisfy."""

from .errors import (
    CalibrationFailed,
    FriezeError,
    InsufficientDepth,
    InvalidPath,
    InvalidQuiverError,
    NotAdjacent,
    NotAffineError,
    NotDivisible,
    ResourceLimitExceeded,
    UnknownConjecture,
)
from .frieze import FriezeTable, XDelta, extract_x_delta, frieze_extend, frieze_specialized, frieze_symbolic
from .lattice import (
    CoxeterData,
    QuiverSpec,
    build_quiver,
    coxeter,
    coxeter_orbit,
    defect,
    delta_vector,
    dim_projective,
    euler_form,
    order_s_theta_cprime,
)
from .laurent import LaurentPoly, RationalSpecialization
from .recdetect import (
    AnnihilatorPoly,
    ConjecturePattern,
    annihilates,
    berlekamp_massey,
    check_conjecture,
    compose_product,
    compose_sum,
    conjecture_pattern,
    vector_recurrence_reduce,
)
from .relations import RelationReport

__all__ = [name for name in dir() if not name.startswith("_")]
