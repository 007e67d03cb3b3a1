"""Exponent specifications and the analytic monotonicity bounds.

A specification ``(gamma, alphas, betas)`` stands for

    f(t) = t**gamma * prod_i (t**alpha_i - 1) / (t**beta_i - 1),

continued by ``prod_i alpha_i / beta_i`` at ``t = 1``.  This module holds the
piecewise bound functions ``F`` and ``S``, the pairing minimisation that turns
per-factor bounds into bounds on the whole product, and the sufficient
conditions built from them.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "SEPARATION_RTOL",
    "DECISION_ATOL",
    "Status",
    "Mode",
    "ExponentSpec",
    "ScaledSpec",
    "SufficientCertificate",
    "ArgWitness",
    "LoewnerWitness",
    "Verdict",
    "Violation",
    "F",
    "S",
    "F_array",
    "S_array",
    "sorted_pairing_sum",
    "brute_force_min_pairing",
    "check_sufficient",
    "check_szabo",
    "szabo_uv_chain",
    "validate_spec",
    "cancel_common_factors",
    "InvalidSpecError",
]

#: Two exponents closer than this (relative) are treated as equal.
SEPARATION_RTOL = 1e-12
#: Slack allowed when comparing analytic sums against 0 and 1.  Inputs such as
#: ``(a, 1 - a)`` are not exactly representable, so boundary cases like the
#: ``f_a`` family land a few ulps on either side of the exact value.
DECISION_ATOL = 1e-12

MAX_BRUTE_FORCE_N = 8


class InvalidSpecError(ValueError):
    """Raised when a specification violates the range an operation needs."""

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(v.message for v in self.violations) or "invalid specification"
        super().__init__(msg)


class Status(enum.Enum):
    PROVED_MONOTONE = "proved_monotone"
    PROVED_NOT_MONOTONE = "proved_not_monotone"
    NUMERIC_MONOTONE = "numeric_monotone"
    NUMERIC_NOT_MONOTONE = "numeric_not_monotone"
    INCONCLUSIVE = "inconclusive"

    @property
    def is_monotone(self) -> bool:
        return self in (Status.PROVED_MONOTONE, Status.NUMERIC_MONOTONE)

    @property
    def is_not_monotone(self) -> bool:
        return self in (Status.PROVED_NOT_MONOTONE, Status.NUMERIC_NOT_MONOTONE)


class Mode(enum.Enum):
    """Range regime for :func:`validate_spec`.

    ``ANALYTIC`` admits the closed range ``0 < exponent <= 2``; ``NUMERIC``
    requires ``0 < exponent < 2`` so that every ``z**a - 1`` stays off the
    positive real axis along the negative half-line.
    """

    ANALYTIC = "analytic"
    NUMERIC = "numeric"


def _as_float_tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ExponentSpec:
    """The triple ``(gamma, alphas, betas)``; ``n = 0`` is the pure power."""

    gamma: float
    alphas: tuple[float, ...] = ()
    betas: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "alphas", _as_float_tuple(self.alphas))
        object.__setattr__(self, "betas", _as_float_tuple(self.betas))
        if len(self.alphas) != len(self.betas):
            raise ValueError(
                f"alphas and betas must have equal length, got "
                f"{len(self.alphas)} and {len(self.betas)}"
            )

    @property
    def n(self) -> int:
        return len(self.alphas)

    @property
    def exponent_sum(self) -> float:
        """``sum(alpha_i - beta_i)``: the argument limit at infinity, in units of pi."""
        return math.fsum(self.alphas) - math.fsum(self.betas)

    def swapped(self) -> "ExponentSpec":
        """Spec of ``g(t)**-1`` with the same gamma (numerator and denominator exchanged)."""
        return ExponentSpec(self.gamma, self.betas, self.alphas)

    def sorted(self) -> "ExponentSpec":
        return ExponentSpec(self.gamma, sorted(self.alphas), sorted(self.betas))

    def value_at_one(self) -> float:
        return math.prod(a / b for a, b in zip(self.alphas, self.betas))


@dataclass(frozen=True)
class ScaledSpec:
    """``scale * f`` for a positive constant ``scale``."""

    scale: float
    spec: ExponentSpec

    def __post_init__(self):
        object.__setattr__(self, "scale", float(self.scale))
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class SufficientCertificate:
    lower_sum: float
    upper_sum: float
    gamma: float
    passes: bool


@dataclass(frozen=True)
class ArgWitness:
    """A point ``z = r e^{i theta}`` where the boundary argument leaves ``[0, pi]``.

    ``arg_over_pi`` is the argument of ``f**s`` divided by pi and ``violation``
    its distance outside ``[0, 1]`` in the same units.
    """

    r: float
    arg_over_pi: float
    violation: float
    theta: float = math.pi
    im_value: float | None = None


@dataclass(frozen=True)
class LoewnerWitness:
    """A point set whose Loewner matrix has a negative eigenvalue."""

    points: tuple[float, ...]
    min_eigenvalue: float
    violation: float


@dataclass
class Verdict:
    status: Status
    method: str
    certificate: SufficientCertificate | None = None
    witness: ArgWitness | LoewnerWitness | None = None
    margin: float = 0.0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.PROVED_MONOTONE and self.certificate is None:
            raise ValueError("a proved-monotone verdict needs a certificate")
        if self.status is Status.NUMERIC_NOT_MONOTONE:
            if self.witness is None or not self.witness.violation > self.margin:
                raise ValueError("a numeric not-monotone verdict needs a witness beyond the margin")


@dataclass(frozen=True)
class Violation:
    field: str
    message: str
    proves_not_monotone: bool = False


# --------------------------------------------------------------------------
# bound functions
# --------------------------------------------------------------------------


def _check_unit_box(a, b, lo_open: bool, name: str):
    ok_lo = (a > 0 and b > 0) if lo_open else (a >= 0 and b >= 0)
    if not (ok_lo and a <= 2 and b <= 2):
        box = "(0,2]" if lo_open else "[0,2]"
        raise ValueError(f"{name}({a}, {b}): arguments must lie in {box}")


def F(a, b):
    """Upper bound (in units of pi) for the argument of ``(z^a-1)/(z^b-1)``.

    Piecewise on ``[0, 2]^2``::

        a - b   if a >= b and b <= 1
        a - 1   if a > 1 and b > 1
        0       if a < b and a <= 1

    Works for ``float`` and :class:`fractions.Fraction` inputs alike.
    """
    _check_unit_box(a, b, lo_open=False, name="F")
    if a >= b and b <= 1:
        return a - b
    if a > 1 and b > 1:
        return a - 1
    return a - a  # a < b, a <= 1; keeps the input's numeric type


def S(a, b):
    """The coarser bound ``S(a, b) = (a - 1)^+ + (1 - b)^+`` on ``(0, 2]^2``."""
    _check_unit_box(a, b, lo_open=True, name="S")
    if a <= 1 and b <= 1:
        return 1 - b
    if a <= 1:
        return a - a
    if b <= 1:
        return a - b
    return a - 1


def F_array(a, b):
    """Vectorised :func:`F` without range checks."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.where(
        (a >= b) & (b <= 1), a - b, np.where((a > 1) & (b > 1), a - 1.0, 0.0)
    )


def S_array(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo_a, lo_b = a <= 1, b <= 1
    return np.where(
        lo_a & lo_b, 1.0 - b, np.where(lo_a, 0.0, np.where(lo_b, a - b, a - 1.0))
    )


# --------------------------------------------------------------------------
# pairing minimisation
# --------------------------------------------------------------------------
#
# Sums are accumulated in exact rational arithmetic so that different
# pairings with mathematically equal totals compare equal; only the final
# result is rounded to float.


def _exact(values) -> list[Fraction]:
    return [Fraction(float(v)) for v in values]


def sorted_pairing_sum(a: Sequence[float], b: Sequence[float]) -> float:
    """``sum F(a_(i), b_(i))`` with both sequences sorted ascending.

    By the Monge property of ``F`` this is the minimum of
    ``sum F(a_i, b_sigma(i))`` over all permutations ``sigma``.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    xs = sorted(_exact(a))
    ys = sorted(_exact(b))
    return float(sum((F(x, y) for x, y in zip(xs, ys)), Fraction(0)))


def brute_force_min_pairing(
    a: Sequence[float], b: Sequence[float]
) -> tuple[tuple[int, ...], float]:
    """Enumerate all of ``S_n`` and return ``(sigma, min sum F(a_i, b_sigma(i)))``.

    Ties resolve to the lexicographically first permutation.  Limited to
    ``n <= 8``; use :func:`sorted_pairing_sum` beyond that.
    """
    n = len(a)
    if len(b) != n:
        raise ValueError(f"length mismatch: {n} vs {len(b)}")
    if n > MAX_BRUTE_FORCE_N:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE_N}, got {n}")
    xs, ys = _exact(a), _exact(b)
    cost = [[F(x, y) for y in ys] for x in xs]
    # scale the dyadic rationals to a common integer grid
    denom = math.lcm(1, *(c.denominator for row in cost for c in row))
    icost = [[c.numerator * (denom // c.denominator) for c in row] for row in cost]
    best_perm: tuple[int, ...] = tuple(range(n))
    best = None
    for perm in itertools.permutations(range(n)):
        total = 0
        for i, j in enumerate(perm):
            total += icost[i][j]
        if best is None or total < best:
            best, best_perm = total, perm
    return best_perm, float(Fraction(best or 0, denom))


# --------------------------------------------------------------------------
# validation and preprocessing
# --------------------------------------------------------------------------


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=SEPARATION_RTOL, abs_tol=0.0)


def validate_spec(spec: ExponentSpec, mode: Mode = Mode.ANALYTIC) -> list[Violation]:
    """Return the list of range violations; empty means ``spec`` is admissible.

    Violations carrying ``proves_not_monotone`` (``|gamma| > 2`` or an exponent
    above 2) are enough on their own to reject operator monotonicity.
    """
    out: list[Violation] = []
    values = [("gamma", spec.gamma)]
    values += [(f"alpha[{i}]", a) for i, a in enumerate(spec.alphas)]
    values += [(f"beta[{i}]", b) for i, b in enumerate(spec.betas)]
    for name, v in values:
        if not math.isfinite(v):
            out.append(Violation(name, f"{name} = {v} is not finite"))
    if out:
        return out

    if abs(spec.gamma) > 2:
        out.append(
            Violation("gamma", f"|gamma| = {abs(spec.gamma)} > 2 => not operator monotone", True)
        )
    strict = mode is Mode.NUMERIC
    for name, v in values[1:]:
        if v <= 0:
            out.append(Violation(name, f"{name} = {v} must be positive"))
        elif v > 2:
            out.append(Violation(name, f"{name} = {v} > 2 => not operator monotone", True))
        elif strict and v >= 2:
            out.append(
                Violation(name, f"{name} = {v}: the boundary engine needs exponents strictly below 2")
            )
    for i, a in enumerate(spec.alphas):
        for j, b in enumerate(spec.betas):
            if _close(a, b):
                out.append(
                    Violation(
                        f"alpha[{i}]",
                        f"alpha[{i}] = {a} ~ beta[{j}] = {b}; cancel the common factor first",
                    )
                )
    return out


def _require(spec: ExponentSpec, mode: Mode) -> None:
    problems = validate_spec(spec, mode)
    if problems:
        raise InvalidSpecError(problems)


def cancel_common_factors(spec: ExponentSpec) -> ExponentSpec:
    """Drop matched ``alpha_i ~ beta_j`` pairs; the function is unchanged on ``(0, inf)``."""
    betas = list(spec.betas)
    alphas = []
    for a in spec.alphas:
        for j, b in enumerate(betas):
            if _close(a, b):
                del betas[j]
                break
        else:
            alphas.append(a)
    return ExponentSpec(spec.gamma, alphas, betas)


# --------------------------------------------------------------------------
# sufficient conditions
# --------------------------------------------------------------------------


def check_sufficient(spec: ExponentSpec, atol: float = DECISION_ATOL) -> Verdict:
    """Sorted-pairing sufficient condition.

    Proves monotonicity when ``0 <= gamma - sum F(beta, alpha)`` and
    ``gamma + sum F(alpha, beta) <= 1`` (sums over the sorted pairing).  The
    test is one-directional, so failure yields ``INCONCLUSIVE``.
    """
    _require(spec, Mode.ANALYTIC)
    lower = sorted_pairing_sum(spec.betas, spec.alphas)
    upper = sorted_pairing_sum(spec.alphas, spec.betas)
    g = spec.gamma
    passes = (g - lower >= -atol) and (g + upper <= 1 + atol)
    cert = SufficientCertificate(lower, upper, g, passes)
    status = Status.PROVED_MONOTONE if passes else Status.INCONCLUSIVE
    return Verdict(status, "thm-1.1", certificate=cert, margin=atol)


def szabo_uv_chain(spec: ExponentSpec) -> tuple[float, float]:
    """The two middle terms of the ``u, v``-indexed chain ``0 <= lo <= hi <= 1``.

    ``u`` (``v``) counts the alphas (betas) that are ``<= 1``.
    """
    al, be = sorted(spec.alphas), sorted(spec.betas)
    n = len(al)
    u = sum(1 for a in al if a <= 1)
    v = sum(1 for b in be if b <= 1)
    g = spec.gamma
    lo = g + math.fsum(al[:u]) + (n - u) - (v + math.fsum(be[v:]))
    hi = g + u + math.fsum(al[u:]) - math.fsum(be[:v]) - (n - v)
    return lo, hi


def check_szabo(spec: ExponentSpec, atol: float = DECISION_ATOL) -> Verdict:
    """The older condition ``0 <= gamma - sum S(b_i, a_i) <= gamma + sum S(a_i, b_i) <= 1``."""
    _require(spec, Mode.ANALYTIC)
    al, be = sorted(spec.alphas), sorted(spec.betas)
    lower = math.fsum(S(b, a) for a, b in zip(al, be))
    upper = math.fsum(S(a, b) for a, b in zip(al, be))
    g = spec.gamma
    lo, hi = szabo_uv_chain(spec)
    if abs(lo - (g - lower)) > 1e-12 or abs(hi - (g + upper)) > 1e-12:
        raise ArithmeticError(
            f"u,v-indexed chain ({lo}, {hi}) disagrees with S sums ({g - lower}, {g + upper})"
        )
    passes = (g - lower >= -atol) and (g - lower <= g + upper + atol) and (g + upper <= 1 + atol)
    cert = SufficientCertificate(lower, upper, g, passes)
    status = Status.PROVED_MONOTONE if passes else Status.INCONCLUSIVE
    return Verdict(status, "szabo", certificate=cert, margin=atol, details={"uv_chain": (lo, hi)})
