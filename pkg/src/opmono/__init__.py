"""Operator monotonicity of ``f(t) = t^gamma prod (t^alpha_i - 1)/(t^beta_i - 1)``.

The package offers analytic sufficient conditions (:mod:`opmono.exponents`),
the exact boundary-argument criterion evaluated numerically
(:mod:`opmono.boundary`), independent Loewner-matrix oracles
(:mod:`opmono.loewner`) and the named families (:mod:`opmono.families`).
"""
from .boundary import (
    ArgProfile,
    NumericInconsistencyError,
    arg_f_boundary,
    arg_witness,
    classify_numeric,
    ray_sweep,
    reflection_residual,
)
from .exponents import (
    F,
    S,
    ExponentSpec,
    InvalidSpecError,
    Mode,
    ScaledSpec,
    Status,
    Verdict,
    brute_force_min_pairing,
    cancel_common_factors,
    check_sufficient,
    check_szabo,
    sorted_pairing_sum,
    validate_spec,
)
from .families import (
    FamilyStatus,
    FamilyVerdict,
    f_a_spec,
    h1_classify,
    h2_classify,
    h2_to_ratio_spec,
    mc_build,
    mc_eval,
    mean_eval,
)
from .loewner import eval_f, eval_f_prime, loewner_test, matrix_pair_probe, witness_search
from .ratio import RatioFunction

__version__ = "0.1.0"
