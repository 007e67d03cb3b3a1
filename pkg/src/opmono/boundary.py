"""Boundary argument of f along the negative half-line.

For ``z = r e^{i theta}`` the argument of ``f`` is tracked factor by factor,

    arg f(z) = gamma * theta + sum_i [Arg(z^alpha_i - 1) - Arg(z^beta_i - 1)],

with ``Arg`` valued in ``[0, 2 pi)``.  For exponents in ``(0, 2)`` and
``theta`` in ``(0, pi]`` no factor touches the positive real axis, so the sum
is continuous in ``r`` and needs no branch bookkeeping.  The sweep over
``theta = pi`` yields the sup/inf quantities ``F0``/``G0`` that decide
operator monotonicity of ``f**s`` exactly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .exponents import (
    ArgWitness,
    ExponentSpec,
    InvalidSpecError,
    Mode,
    Status,
    Verdict,
    validate_spec,
)
from .ratio import RatioFunction, as_ratio

__all__ = [
    "NumericInconsistencyError",
    "ArgProfile",
    "arg_pos",
    "factor_arg",
    "arg_f_boundary",
    "ray_arg",
    "ray_sweep",
    "reflection_residual",
    "classify_numeric",
    "arg_witness",
    "tail_bound",
    "write_profile_csv",
]

TWO_PI = 2.0 * math.pi
LN10 = math.log(10.0)
#: Below this, estimate differences are treated as floating-point noise.
NOISE = 1e-12
#: Hard cap on tail extension, in decades of r.
MAX_TAIL_DECADES = 1e5
#: Cap on the number of local extrema refined per sweep.
MAX_REFINED = 64


class NumericInconsistencyError(ArithmeticError):
    """Two routes that must agree (an identity or a cross-check) did not."""


def _r_from_log10(x: float) -> float:
    # witnesses on an auto-extended tail can lie beyond the float range
    return float(10.0 ** x) if abs(x) < 300 else (math.inf if x > 0 else 0.0)


def arg_pos(re_part: float, im_part: float) -> float:
    """Angle of ``re + i im`` in ``[0, 2 pi)``."""
    if re_part == 0 and im_part == 0:
        raise ValueError("Arg is undefined at 0")
    a = math.atan2(im_part, re_part)
    return a + TWO_PI if a < 0 else a


def factor_arg(c, log_r, theta):
    """``Arg(z**c - 1)`` in ``[0, 2 pi)`` for ``z = exp(log_r + i theta)`` and ``c > 0``.

    The real part is formed as ``expm1(c log r) cos(c theta) - 2 sin^2(c theta / 2)``
    so that nothing cancels when ``z**c`` is close to 1.
    """
    log_r = np.asarray(log_r, dtype=float)
    ct = c * theta
    u = c * log_r
    # for large r divide through by r**c: z**c - 1 = r**c (e^{i c theta} - r**-c)
    big = u > 1.0
    us = np.where(big, 1.0, u)
    re = np.where(big, np.cos(ct) - np.exp(-np.abs(u)),
                  np.expm1(us) * np.cos(ct) - 2.0 * np.sin(0.5 * ct) ** 2)
    im = np.where(big, np.sin(ct), np.exp(us) * np.sin(ct))
    a = np.arctan2(im, re)
    return np.where(a < 0, a + TWO_PI, a)


def _e_arg(c, log_r, theta):
    # argument of E(c, z) = (z^c - 1)/c, continuous in r, 0 on r > 1 as theta -> 0
    if c > 0:
        return factor_arg(c, log_r, theta)
    if c < 0:
        return c * theta + factor_arg(-c, log_r, theta)
    return np.arctan2(theta, np.asarray(log_r, dtype=float))


def _g_arg(alphas, betas, log_r, theta=math.pi):
    log_r = np.asarray(log_r, dtype=float)
    out = np.zeros_like(log_r)
    for a in alphas:
        out = out + _e_arg(a, log_r, theta)
    for b in betas:
        out = out - _e_arg(b, log_r, theta)
    return out


def ray_arg(func, log_r, theta=math.pi):
    """Continuous ``arg f(e^{log_r + i theta})`` for any :class:`RatioFunction`-like input.

    Negative exponents go through ``E(c) = z^c E(-c)``, zero exponents are
    ``log z``.  Valid while every ``|c| theta < 2 pi``.
    """
    if isinstance(func, ExponentSpec):
        gamma, al, be = func.gamma, func.alphas, func.betas
    else:
        f = as_ratio(func)
        gamma, al, be = f.gamma, f.alphas, f.betas
    return gamma * theta + _g_arg(al, be, log_r, theta)


def _require_numeric(spec: ExponentSpec) -> None:
    problems = validate_spec(spec, Mode.NUMERIC)
    if problems:
        raise InvalidSpecError(problems)


def arg_f_boundary(spec: ExponentSpec, r: float, theta: float = math.pi) -> float:
    """``arg f(r e^{i theta})`` for a spec with exponents in ``(0, 2)``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    if not 0 < theta <= math.pi:
        raise ValueError(f"theta must lie in (0, pi], got {theta}")
    _require_numeric(spec)
    return float(ray_arg(spec, math.log(r), theta))


def reflection_residual(spec: ExponentSpec, r: float) -> float:
    """``arg g(e^{i pi}/r) + arg g(r e^{i pi}) - sum(alpha - beta) pi`` (``gamma`` excluded)."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    _require_numeric(spec)
    lr = math.log(r)
    both = _g_arg(spec.alphas, spec.betas, np.array([lr, -lr]))
    return float(both[0] + both[1] - spec.exponent_sum * math.pi)


def tail_bound(spec: ExponentSpec, log_r: float) -> float:
    """Bound on ``|arg g(r e^{i pi})|`` valid for every ``r <= exp(log_r) < 1``.

    Each factor ``-1 + z^c`` with ``|z^c| = rho < 1`` deviates from ``pi`` by
    at most ``asin(rho)``.  By the reflection identity the same number bounds
    ``|arg g - sum(alpha - beta) pi|`` for ``r >= exp(-log_r)``.
    """
    total = 0.0
    for c in spec.alphas + spec.betas:
        rho = math.exp(c * log_r) if c * log_r < 0 else 1.0
        total += math.asin(min(1.0, rho))
    return total


@dataclass
class ArgProfile:
    """Sampled ``r -> arg g(r e^{i pi})`` with the derived sup/inf estimates.

    ``F0_est``/``G0_est`` are in units of pi; ``theta_lower``/``Theta_upper``
    and the limits are in radians.  ``grid_resolution`` is the error bar on
    the estimates (units of pi) and already includes the tail truncation.
    """

    log10_r: np.ndarray
    arg_over_pi: np.ndarray
    F0_est: float
    G0_est: float
    theta_lower: float
    Theta_upper: float
    limit_zero: float
    limit_infinity: float
    grid_resolution: float
    tail_error: float
    extra_log10_r: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    extra_arg_over_pi: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def samples(self):
        return list(zip(self.log10_r.tolist(), self.arg_over_pi.tolist()))

    def all_points(self):
        """Every evaluated point (grid, tails, refined extrema) sorted by ``log10 r``."""
        x = np.concatenate([self.log10_r, self.extra_log10_r])
        v = np.concatenate([self.arg_over_pi, self.extra_arg_over_pi])
        order = np.argsort(x, kind="stable")
        return x[order], v[order]


def _local_extrema(v: np.ndarray) -> np.ndarray:
    if v.size < 3:
        return np.empty(0, dtype=int)
    mid = v[1:-1]
    is_max = (mid > v[:-2]) & (mid >= v[2:])
    is_min = (mid < v[:-2]) & (mid <= v[2:])
    idx = np.nonzero(is_max | is_min)[0] + 1
    if idx.size > MAX_REFINED:
        # keep those farthest from the running median
        dev = np.abs(v[idx] - np.median(v))
        idx = np.sort(idx[np.argsort(-dev, kind="stable")[:MAX_REFINED]])
    return idx


def ray_sweep(
    spec: ExponentSpec,
    r_min: float = 1e-8,
    r_max: float = 1e8,
    n_samples: int = 4096,
    *,
    refine: bool = True,
    refine_tol: float = 1e-6,
    tail_tol: float = 1e-7,
) -> ArgProfile:
    """Sample ``arg g(r e^{i pi})`` log-uniformly and estimate ``F0``, ``G0``, theta, Theta.

    ``gamma`` is excluded (``g`` is the bare product).  Grid extrema are
    polished with a bounded scalar minimiser to ``refine_tol`` in ``log10 r``.
    Where the requested range leaves a tail contribution above ``tail_tol``
    the sweep is extended outward until :func:`tail_bound` drops below it
    (or ``MAX_TAIL_DECADES`` is reached); the remaining bound is reported.
    """
    _require_numeric(spec)
    if not 0 < r_min < r_max:
        raise ValueError("need 0 < r_min < r_max")
    if n_samples < 3:
        raise ValueError("n_samples must be at least 3")
    al, be = spec.alphas, spec.betas
    lo10, hi10 = math.log10(r_min), math.log10(r_max)
    x = np.linspace(lo10, hi10, n_samples)

    extra_x = [np.array([0.0])]
    if spec.n:
        cmin = min(al + be)
        need = math.log(math.sin(tail_tol / (2 * spec.n))) / cmin / LN10
        need = max(need, -MAX_TAIL_DECADES)
        density = (n_samples - 1) / (hi10 - lo10)
        if need < lo10:
            k = int(min(4096, max(64, (lo10 - need) * min(density, 32.0))))
            extra_x.append(np.linspace(need, lo10, k, endpoint=False))
        if -need > hi10:
            k = int(min(4096, max(64, (-need - hi10) * min(density, 32.0))))
            extra_x.append(np.linspace(-need, hi10, k, endpoint=False)[::-1])
    ex = np.concatenate(extra_x)

    def arg_over_pi(x10):
        return _g_arg(al, be, np.asarray(x10) * LN10) / math.pi

    v = arg_over_pi(x)
    ev = arg_over_pi(ex)
    allx = np.concatenate([x, ex])
    allv = np.concatenate([v, ev])
    order = np.argsort(allx, kind="stable")
    allx, allv = allx[order], allv[order]

    refined_x, refined_v = [], []
    refine_err = 0.0
    if refine and spec.n and np.ptp(allv) > NOISE:
        for k in _local_extrema(allv):
            sign = -1.0 if allv[k] >= allv[k - 1] else 1.0  # maximise peaks, minimise troughs
            res = minimize_scalar(
                lambda t: sign * float(arg_over_pi(t)),
                bounds=(allx[k - 1], allx[k + 1]),
                method="bounded",
                options={"xatol": refine_tol},
            )
            xs = float(res.x)
            vs = float(arg_over_pi(xs))
            refined_x.append(xs)
            refined_v.append(vs)
            nb = arg_over_pi(np.array([xs - refine_tol, xs + refine_tol]))
            refine_err = max(refine_err, float(np.max(np.abs(nb - vs))))
    rx = np.array(refined_x)
    rv = np.array(refined_v)

    total = spec.exponent_sum
    limit_inf = total * math.pi
    pool_x = np.concatenate([allx, rx])
    pool_v = np.concatenate([allv, rv])
    F0 = max(float(pool_v.max()), 0.0, total)
    G0 = min(float(pool_v.min()), 0.0, total)
    inner = pool_v[pool_x <= 0]
    theta_lower = min(float(inner.min()), 0.0) * math.pi
    Theta_upper = max(float(inner.max()), 0.0) * math.pi

    if spec.n:
        ends = (float(allx[0]) * LN10, -float(allx[-1]) * LN10)
        tail_err = max(tail_bound(spec, e) if e < 0 else math.pi for e in ends)
    else:
        tail_err = 0.0

    return ArgProfile(
        log10_r=x,
        arg_over_pi=v,
        F0_est=F0,
        G0_est=G0,
        theta_lower=theta_lower,
        Theta_upper=Theta_upper,
        limit_zero=0.0,
        limit_infinity=limit_inf,
        grid_resolution=tail_err / math.pi + refine_err,
        tail_error=tail_err,
        extra_log10_r=np.concatenate([ex, rx]),
        extra_arg_over_pi=np.concatenate([ev, rv]),
    )


def classify_numeric(
    spec: ExponentSpec,
    s: float = 1.0,
    margin: float = 1e-3,
    **sweep_kwargs,
) -> Verdict:
    """Decide operator monotonicity of ``f**s`` from sweep estimates of ``F0``.

    ``f**s`` is operator monotone iff ``gamma - F0(beta, alpha) >= 0`` and
    ``s (gamma + F0(alpha, beta)) <= 1``.  Both are restated as argument
    violations of ``f**s`` in units of pi; a violation above ``margin`` (with a
    sampled witness) gives ``NUMERIC_NOT_MONOTONE``, slack of at least
    ``margin`` on both gives ``NUMERIC_MONOTONE``, anything in between is
    ``INCONCLUSIVE``.
    """
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    if margin < 0:
        raise ValueError("margin must be non-negative")
    _require_numeric(spec)
    prof = ray_sweep(spec, **sweep_kwargs)
    prof_swapped = ray_sweep(spec.swapped(), **sweep_kwargs)
    F0_ab = prof.F0_est
    F0_ba = prof_swapped.F0_est
    err = max(prof.grid_resolution, prof_swapped.grid_resolution)
    if abs(F0_ba + prof.G0_est) > 1e-6 + err:
        raise NumericInconsistencyError(
            f"F0(beta, alpha) = {F0_ba} but -G0(alpha, beta) = {-prof.G0_est}"
        )
    g = spec.gamma
    lower_slack = g - F0_ba
    upper_slack = 1.0 - s * (g + F0_ab)
    violation = max(-s * lower_slack, -upper_slack)
    details = {
        "F0_est": F0_ab,
        "G0_est": prof.G0_est,
        "F0_swapped_est": F0_ba,
        "lower_slack": lower_slack,
        "upper_slack": upper_slack,
        "violation": violation,
        "resolution": err,
        "s": s,
    }
    if violation > margin + NOISE:
        xs, vs = prof.all_points()
        a = s * (g + vs)
        viol = np.maximum(a - 1.0, -a)
        k = int(np.argmax(viol))
        if viol[k] > margin:
            w = ArgWitness(r=_r_from_log10(xs[k]), arg_over_pi=float(a[k]), violation=float(viol[k]))
            return Verdict(Status.NUMERIC_NOT_MONOTONE, "thm-2.2-numeric", witness=w,
                           margin=margin, details=details)
        return Verdict(Status.INCONCLUSIVE, "thm-2.2-numeric", margin=margin, details=details)
    if violation <= -margin + NOISE:
        return Verdict(Status.NUMERIC_MONOTONE, "thm-2.2-numeric", margin=margin, details=details)
    return Verdict(Status.INCONCLUSIVE, "thm-2.2-numeric", margin=margin, details=details)


def arg_witness(
    func,
    s: float = 1.0,
    *,
    theta: float | None = None,
    log10_range: tuple[float, float] = (-200.0, 200.0),
    n: int = 8001,
    tol: float = 1e-9,
) -> ArgWitness | None:
    """Scan ``arg f(z)**s`` along ``|z| = r`` at angle ``theta`` for a point outside ``[0, pi]``.

    Works for any :class:`RatioFunction` (negative and zero exponents
    included).  With an exponent of modulus 2 the scan runs just inside the
    upper half-plane, ``theta = pi (1 - 1e-9)``, since ``z^2 - 1`` meets the
    positive axis on the ray itself.  The returned witness carries
    ``Im f(z)`` from direct complex evaluation as an independent sign check.
    """
    f = as_ratio(func)
    cmax = max((abs(c) for c in f.exponents), default=0.0)
    if theta is None:
        theta = math.pi if cmax < 2 else math.pi * (1 - 1e-9)
    if cmax * theta >= TWO_PI:
        raise ValueError("theta too large for the exponents in use")
    x10 = np.linspace(log10_range[0], log10_range[1], n)
    a = s * ray_arg(f, x10 * LN10, theta) / math.pi
    viol = np.maximum(a - 1.0, -a)
    k = int(np.argmax(viol))
    if not viol[k] > tol:
        return None
    r = _r_from_log10(x10[k])
    im = None
    if s == 1:
        # Im f = |f| sin(arg f), formed from the log so that only the magnitude can overflow
        lf = f.complex_log_value(np.exp(complex(x10[k] * LN10, theta)))
        with np.errstate(over="ignore"):
            im = float(np.exp(lf.real) * math.sin(lf.imag))
    return ArgWitness(r=r, arg_over_pi=float(a[k]), violation=float(viol[k]), theta=theta,
                      im_value=im)


def write_profile_csv(profile: ArgProfile, fp) -> None:
    """Emit ``r, log10_r, arg_over_pi`` rows (header included, LF endings)."""
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["r", "log10_r", "arg_over_pi"])
    for x, v in zip(profile.log10_r.tolist(), profile.arg_over_pi.tolist()):
        w.writerow([f"{10.0 ** x:.17g}", f"{x:.17g}", f"{v:.17g}"])
