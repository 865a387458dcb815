"""Generalized Hurwitz zeta series: evaluation, structural form decisions,
prime-ideal density experiments, phase constructions, and zero location."""

from .arith import Factorization, FactorCache, PeriodicFunction, factorize, is_prime, poly_roots_mod_prime_power
from .characters import DirichletCharacter, characters_mod
from .construction import (
    ConstructionProfile,
    PhiAssignment,
    SigmaCertificate,
    StageState,
    ThinClass,
    Unreachable,
    bohr_solve,
    run_construction,
    select_sigma,
    stage_advance,
)
from .density import DensityReport, WindowSpec, density_sweep, private_prime_scan, smooth_set
from .ideals import (
    AlgebraicAlpha,
    IdealFactorizationRecord,
    PrimeIdealKey,
    congruence_check,
    ideal_factorize,
    norm_value,
)
from .structure import (
    DecompositionResult,
    LiftedSeries,
    PLCertificate,
    RationalShift,
    detect_pl_form,
    decompose,
    lift_rational,
    nonvanishing_verdict,
)
from .zeros import Rectangle, WindingResult, winding_number, zero_search
from .zeta import (
    ComplexPoint,
    EvalResult,
    PoleAtOne,
    PrecisionProfile,
    abs_tail,
    f_eval,
    hurwitz_zeta,
)

__version__ = "0.1.0"
