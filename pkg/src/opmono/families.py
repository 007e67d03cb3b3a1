"""Named families: ``f_a``, ``h_1``, ``h_2``, Morozova-Chentsov functions and two classical means.

Each family has a closed-form classifier encoding exactly the published
conditions, plus an evaluation hook (a :class:`RatioFunction`) so the
numeric oracles can be pointed at it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .boundary import arg_witness, classify_numeric
from .exponents import (
    ArgWitness,
    ExponentSpec,
    LoewnerWitness,
    Mode,
    ScaledSpec,
    Status,
    cancel_common_factors,
    validate_spec,
)
from .loewner import (
    SearchBudget,
    chebyshev_points,
    loewner_test,
    matrix_pair_probe,
    witness_search,
)
from .ratio import RatioFunction, as_ratio

__all__ = [
    "FamilyStatus",
    "FamilyVerdict",
    "f_a_spec",
    "f_a_function",
    "h1_function",
    "h1_classify",
    "h2_function",
    "h2_classify",
    "h2_to_ratio_spec",
    "h2_boundary_imag",
    "MCFunction",
    "mc_build",
    "mc_eval",
    "mc_route_ratio",
    "PowerDifference",
    "Lehmer",
    "mean_eval",
    "mean_function",
    "Confirmation",
    "confirm_not_monotone",
    "confirm_monotone",
]

#: Tolerance for region membership, so grid points like 0.35 - (-0.65) sit on the boundary.
REGION_TOL = 1e-12


class FamilyStatus(enum.Enum):
    MONOTONE = "monotone"
    NOT_MONOTONE = "not_monotone"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FamilyVerdict:
    status: FamilyStatus
    source: str


def _eq(x: float, y: float) -> bool:
    return abs(x - y) <= REGION_TOL


def _in(x: float, lo: float, hi: float) -> bool:
    return lo - REGION_TOL <= x <= hi + REGION_TOL


# --------------------------------------------------------------------------
# f_a
# --------------------------------------------------------------------------


def f_a_function(a: float) -> RatioFunction:
    """``a (1 - a) (t - 1)^2 / ((t^a - 1)(t^{1-a} - 1))`` in normalised form.

    At ``a`` in ``{0, 1}`` this is the logarithmic mean ``(t - 1) / log t``, an
    extension beyond the product form (which degenerates there).
    """
    return RatioFunction(0.0, (1.0, 1.0), (a, 1.0 - a))


def f_a_spec(a: float) -> ScaledSpec:
    """Positive-exponent rewrite of ``f_a`` for ``a`` in ``[-1, 2]`` minus ``{0, 1}``."""
    if not -1 <= a <= 2:
        raise ValueError(f"a must lie in [-1, 2], got {a}")
    if a in (0, 1):
        raise ValueError("f_a degenerates at a = 0 and a = 1")
    if 0 < a < 1:
        spec = ExponentSpec(0.0, (1.0, 1.0), (a, 1.0 - a))
        scale = a * (1 - a)
    elif a > 1:
        spec = ExponentSpec(a - 1.0, (1.0, 1.0), (a, a - 1.0))
        scale = a * (a - 1)
    else:
        spec = ExponentSpec(-a, (1.0, 1.0), (-a, 1.0 - a))
        scale = (-a) * (1 - a)
    return ScaledSpec(scale, cancel_common_factors(spec))


# --------------------------------------------------------------------------
# h_1 and h_2
# --------------------------------------------------------------------------


def h1_function(a: float, b: float) -> RatioFunction:
    """``(b/a) (t^a - 1) / (t^b - 1)``, with ``(t^0 - 1)/0`` read as ``log t``."""
    if _eq(a, b):
        raise ValueError("h1 needs a != b")
    return RatioFunction(0.0, (a,), (b,))


def h1_classify(a: float, b: float) -> FamilyVerdict:
    """Operator monotone iff ``(0 < a-b <= 1, a >= -1, b <= 1)`` or ``(a, b)`` in ``[0,1]x[-1,0]``, not the origin."""
    if _eq(a, b):
        raise ValueError("h1 needs a != b")
    if not (abs(a) <= 2 + REGION_TOL and abs(b) <= 2 + REGION_TOL):
        raise ValueError("h1 is classified for |a|, |b| <= 2")
    d = a - b
    if d > REGION_TOL and d <= 1 + REGION_TOL and a >= -1 - REGION_TOL and b <= 1 + REGION_TOL:
        return FamilyVerdict(FamilyStatus.MONOTONE, "h1: 0 < a-b <= 1, a >= -1, b <= 1")
    if _in(a, 0, 1) and _in(b, -1, 0) and not (_eq(a, 0) and _eq(b, 0)):
        return FamilyVerdict(FamilyStatus.MONOTONE, "h1: (a,b) in [0,1]x[-1,0]")
    return FamilyVerdict(FamilyStatus.NOT_MONOTONE, "h1: outside the monotone region")


def h2_function(a: float, b: float) -> RatioFunction:
    """``(t^a + 1) / (t^b + 1)`` via ``t^c + 1 = 2 E(2c) / E(c)``."""
    if _eq(a, b):
        raise ValueError("h2 needs a != b")
    return RatioFunction(0.0, (2.0 * a, b), (a, 2.0 * b))


def h2_classify(a: float, b: float) -> FamilyVerdict:
    """Encode the published ``h_2`` clauses; the remainder of the box stays ``UNKNOWN``."""
    if _eq(a, b):
        raise ValueError("h2 needs a != b")
    if not (_in(a, 0, 1) and _in(b, -1, 0)):
        return FamilyVerdict(FamilyStatus.NOT_MONOTONE, "h2: necessary box [0,1]x[-1,0] fails")
    if _eq(a, 1) and -1 + REGION_TOL < b < -REGION_TOL:
        return FamilyVerdict(FamilyStatus.NOT_MONOTONE, "h2: a = 1 and -1 < b < 0")
    if _eq(b, -1) and REGION_TOL < a < 1 - REGION_TOL:
        return FamilyVerdict(FamilyStatus.NOT_MONOTONE, "h2: b = -1 and 0 < a < 1")
    d = a - b
    if d > REGION_TOL and d <= 1 + REGION_TOL and b <= REGION_TOL and a >= -REGION_TOL:
        return FamilyVerdict(FamilyStatus.MONOTONE, "h2: 0 < a-b <= 1 and b <= 0 <= a")
    if _eq(a, -b) and _in(a, 0, 1) and a > REGION_TOL:
        return FamilyVerdict(FamilyStatus.MONOTONE, "h2: 0 < a = -b <= 1")
    return FamilyVerdict(FamilyStatus.UNKNOWN, "h2: inside the necessary box, no clause applies")


def h2_to_ratio_spec(a: float, b: float) -> ScaledSpec:
    """``h_2 = t^{-b} (t^{2a}-1)(t^{-b}-1) / ((t^a-1)(t^{-2b}-1))`` for ``a > 0 > b``.

    When ``a = -b`` the factors cancel and ``h_2`` is the pure power ``t^a``,
    which is returned as such.
    """
    if not (0 < a <= 1 and -1 <= b < 0):
        raise ValueError(f"need a in (0, 1] and b in [-1, 0), got ({a}, {b})")
    if _eq(a, -b):
        return ScaledSpec(1.0, ExponentSpec(a))
    return ScaledSpec(1.0, ExponentSpec(-b, (2 * a, -b), (a, -2 * b)))


def h2_boundary_imag(a: float, b: float, r):
    """``Im h_2(r e^{i pi})`` from ``(z^a + 1)/(z^b + 1)`` with principal powers."""
    z = -np.asarray(r, dtype=float) + 0j
    lz = np.log(np.abs(z)) + 1j * math.pi
    return np.imag((np.exp(a * lz) + 1) / (np.exp(b * lz) + 1))


# --------------------------------------------------------------------------
# Morozova-Chentsov functions
# --------------------------------------------------------------------------


def _log_sinhc(u):
    # log(sinh(u)/u), even in u
    u = np.abs(np.asarray(u, dtype=float))
    out = np.empty_like(u)
    small = u < 1e-4
    us = u[small]
    out[small] = us**2 / 6 - us**4 / 180
    ub = u[~small]
    out[~small] = ub + np.log1p(-np.exp(-2 * ub)) - math.log(2.0) - np.log(ub)
    return out


@dataclass(frozen=True)
class MCFunction:
    """Morozova-Chentsov data: exponents plus the exponent that makes ``f(t) = t f(1/t)``.

    ``gamma_printed`` keeps ``(1 + sum(alpha - beta)) / 2`` for comparison;
    it symmetrises ``f`` only when ``sum(alpha) == sum(beta)``.
    """

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    gamma_sym: float
    gamma_printed: float
    symmetry_residual: float

    @property
    def spec(self) -> ExponentSpec:
        return ExponentSpec(self.gamma_sym, self.alphas, self.betas)


def _symmetry_residual(spec: ExponentSpec, t: np.ndarray) -> float:
    f = as_ratio(spec)
    ft = f.value(t)
    return float(np.max(np.abs(ft - t * f.value(1.0 / t)) / np.maximum(1.0, ft)))


def mc_build(alphas, betas, seed: int = 0) -> MCFunction:
    """Pick the exponent ``gamma`` with ``f(t) = t f(1/t)`` by testing both candidate signs.

    The candidates ``(1 +- sum(alpha - beta)) / 2`` are each checked on 100
    log-uniform ``t`` in ``[1e-3, 1e3]``; the one whose residual vanishes wins.
    """
    probe = ExponentSpec(0.0, alphas, betas)
    problems = [v for v in validate_spec(probe, Mode.ANALYTIC) if v.field != "gamma"]
    if problems:
        raise ValueError("; ".join(p.message for p in problems))
    total = probe.exponent_sum
    t = np.exp(np.random.default_rng(seed).uniform(math.log(1e-3), math.log(1e3), 100))
    best = None
    for g in ((1 - total) / 2, (1 + total) / 2):
        res = _symmetry_residual(ExponentSpec(g, alphas, betas), t)
        if best is None or res < best[1]:
            best = (g, res)
    if best[1] > 1e-9:
        raise ArithmeticError(f"no candidate exponent symmetrises f (best residual {best[1]})")
    return MCFunction(probe.alphas, probe.betas, best[0], (1 + total) / 2, best[1])


def mc_eval(mc: MCFunction, lam: float, mu: float, route: str = "ratio",
            gamma: float | None = None) -> float:
    """``c(lam, mu)`` by the ``"ratio"`` route ``1/(mu f(lam/mu))`` or the ``"sinh"`` product.

    ``gamma`` overrides the exponent used by the ratio route.
    """
    if not (lam > 0 and mu > 0):
        raise ValueError("lambda and mu must be positive")
    if route == "ratio":
        g = mc.gamma_sym if gamma is None else gamma
        f = as_ratio(ExponentSpec(g, mc.alphas, mc.betas))
        return float(1.0 / (mu * f.value(lam / mu)))
    if route == "sinh":
        y = 0.5 * math.log(lam / mu)
        log_c = -0.5 * (math.log(lam) + math.log(mu))
        for a, b in zip(mc.alphas, mc.betas):
            log_c += math.log(b / a) + float(_log_sinhc(b * y)) - float(_log_sinhc(a * y))
        return math.exp(log_c)
    raise ValueError(f"unknown route {route!r}")


def mc_route_ratio(mc: MCFunction, lam: float, mu: float, gamma: float | None = None) -> float:
    """``c_ratio / c_sinh``; identically 1 under ``gamma_sym``."""
    return mc_eval(mc, lam, mu, "ratio", gamma) / mc_eval(mc, lam, mu, "sinh")


# --------------------------------------------------------------------------
# classical means
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerDifference:
    alpha: float


@dataclass(frozen=True)
class Lehmer:
    p: float


def mean_function(kind) -> RatioFunction:
    """Representing function: ``M_alpha = h_1(alpha, alpha-1)``, ``L_p = h_2(p, p-1)``."""
    if isinstance(kind, PowerDifference):
        if not -1 <= kind.alpha <= 2:
            raise ValueError("power difference mean needs alpha in [-1, 2]")
        return h1_function(kind.alpha, kind.alpha - 1)
    if isinstance(kind, Lehmer):
        if not 0 <= kind.p <= 1:
            raise ValueError("Lehmer mean needs p in [0, 1]")
        return h2_function(kind.p, kind.p - 1)
    raise TypeError(f"unknown mean {kind!r}")


def mean_eval(kind, t):
    out = mean_function(kind).value(t)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# oracle cross-checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Confirmation:
    oracle: str
    witness: ArgWitness | LoewnerWitness | None = None
    details: dict | None = None


def confirm_not_monotone(
    func,
    *,
    budget: SearchBudget | None = None,
    probe_dims=(2, 3, 4, 6),
    probe_trials: int = 100,
    seed: int = 0,
    arg_tol: float = 1e-11,
) -> Confirmation | None:
    """Try to certify failure of operator monotonicity with any available oracle.

    In order: the boundary engine on the positive-exponent rewrite (exact
    criterion, needs exponents in ``(0, 2)``), a direct argument scan of the
    continuation (handles log factors and exponent 2), a Loewner witness
    search, and random matrix pairs.  Returns the first success.
    """
    f = as_ratio(func)
    rewrite = f.to_scaled_spec()
    if rewrite is not None and not validate_spec(rewrite.spec, Mode.NUMERIC):
        v = classify_numeric(rewrite.spec, margin=arg_tol)
        if v.status is Status.NUMERIC_NOT_MONOTONE:
            return Confirmation("boundary-arg", v.witness, v.details)
    w = arg_witness(f, tol=arg_tol)
    if w is not None and (w.im_value is None or w.im_value < 0):
        return Confirmation("arg-scan", w)
    lw = witness_search(f, budget)
    if lw is not None:
        return Confirmation("loewner-witness", lw)
    for d in probe_dims:
        rep = matrix_pair_probe(f, d, probe_trials, seed)
        if rep.violations:
            return Confirmation("matrix-probe", None, {"dimension": d, "violations": rep.violations,
                                                       "worst_min_eigenvalue": rep.worst_min_eigenvalue})
    return None


def confirm_monotone(func, point_sets=None) -> bool:
    """All Loewner matrices on the given point sets (default: 5 and 8 Chebyshev points) are PSD."""
    if point_sets is None:
        point_sets = (chebyshev_points(5), chebyshev_points(8))
    return all(loewner_test(func, pts).psd for pts in point_sets)
