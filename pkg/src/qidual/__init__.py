"""Finite, exact or certified computations on the torus sequence groups T^H_p and the a-adic groups G_p."""

from .adic import (
    AdicDigits,
    DigitChar,
    GammaSeq,
    SparseGammaChar,
    annihilator_test,
    digitchar_to_int,
    digits_of,
    embed_Sp,
    from_digits,
    int_to_digitchar,
    norm_gp,
    pair_gp,
    q_approx,
    quotient_reduce,
    r0_dist,
)
from .characters import (
    Character,
    TSeqNeighborhood,
    WindowSet,
    lemma1_bounds,
    norm,
    pair,
    tseq_member,
    tseq_window_inclusion,
    window_enumerate,
)
from .errors import BudgetExhausted, NotInQError, ParameterError, QIError, QuadratureNonConvergence, SpecTooShort
from .kakutani import DensityFamily, HellingerTrace, Verdict, hellinger_closed, hellinger_quad, kakutani_classify
from .monothetic import GeneratorSpec, approx_power, build_generator, kronecker_covering_bound, kronecker_search
from .polars import (
    BoundedCertificate,
    HullWitness,
    PolarVerdict,
    bipolar_search,
    bipolar_sup,
    holder_extremal,
    hull_witness,
    polar_member_closed,
    polar_sup_oracle,
)
from .torus import RealSeq, TorusSeq, canonical_angle, chord, dist_p, quotient_dist, quotient_iso, rho_p

__version__ = "0.1.0"
