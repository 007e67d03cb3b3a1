"""Cancellation-safe evaluation of power-ratio functions.

Every function handled by the package is written as

    f(t) = scale * t**gamma * prod_i E(alpha_i, log t) / E(beta_i, log t),
    E(c, x) = expm1(c x) / c        (E(0, x) = x, i.e. the factor log t),

with equally many numerator and denominator factors.  ``E(c, x) / x`` is a
smooth positive function of ``c x``, so the ``x`` factors cancel and the
whole expression can be evaluated in log space without a special case at
``t = 1``.  Exponents may be negative or zero here, which covers the
``h_1``/``h_2`` families and the logarithmic limits directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponents import ExponentSpec, ScaledSpec, cancel_common_factors

__all__ = ["RatioFunction", "as_ratio", "log_expm1_ratio", "expm1_ratio_slope"]


def log_expm1_ratio(y):
    """``log(expm1(y) / y)``, accurate for all real ``y`` (0 at ``y = 0``)."""
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    y2 = y * y
    series = y / 2 + y2 * (1 / 24 - y2 * (1 / 2880 - y2 / 181440))
    with np.errstate(divide="ignore", invalid="ignore"):
        # the same expression serves both signs of y
        direct = np.maximum(y, 0.0) + np.log(-np.expm1(-ay)) - np.log(ay)
    return np.where(ay < 1e-2, series, direct)


def expm1_ratio_slope(y):
    """``1/(1 - exp(-y)) - 1/y``: the pole-free part of ``d/dy log expm1(y)``."""
    y = np.asarray(y, dtype=float)
    series = 0.5 + y / 12 - y**3 / 720 + y**5 / 30240
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        direct = 1.0 / (-np.expm1(-y)) - 1.0 / y
    return np.where(np.abs(y) < 1e-3, series, direct)


def _log_e_complex(c: float, lz):
    """A logarithm of ``expm1(c lz)/c`` (any branch) that does not overflow for large ``Re(c lz)``."""
    if c == 0:
        return np.log(lz)
    w = c * lz
    big = w.real > 1.0
    ws = np.where(big, 1.0, w)
    with np.errstate(over="ignore"):
        small = np.log(np.expm1(ws))
    large = w + np.log(-np.expm1(-np.where(big, w, 1.0)))
    return np.where(big, large, small) - np.log(complex(c))


@dataclass(frozen=True)
class RatioFunction:
    """``scale * t**gamma * prod E(alpha_i) / E(beta_i)``; see the module docstring."""

    gamma: float
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "scale", float(self.scale))
        if len(self.alphas) != len(self.betas):
            raise ValueError("numerator and denominator need the same number of factors")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def exponents(self) -> tuple[float, ...]:
        return self.alphas + self.betas

    def _weights(self):
        c = np.array(self.alphas + self.betas, dtype=float)
        sign = np.concatenate([np.ones(len(self.alphas)), -np.ones(len(self.betas))])
        return c, sign

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise ValueError("t must be positive")
        x = np.log(t)
        out = self.gamma * x + math.log(self.scale)
        if self.alphas:
            c, sign = self._weights()
            y = np.multiply.outer(c, x)
            out = out + np.tensordot(sign, log_expm1_ratio(y), axes=1)
        return out

    def value(self, t, s: float = 1.0):
        return np.exp(s * self.log_value(t))

    def log_derivative(self, t):
        """``d/dt log f(t)``."""
        t = np.asarray(t, dtype=float)
        x = np.log(t)
        acc = np.full_like(x, self.gamma)
        if self.alphas:
            c, sign = self._weights()
            y = np.multiply.outer(c, x)
            acc = acc + np.tensordot(sign * c, expm1_ratio_slope(y), axes=1)
        return acc / t

    def derivative(self, t, s: float = 1.0):
        """``d/dt f(t)**s``."""
        return s * self.value(t, s) * self.log_derivative(t)

    def complex_value(self, z):
        """Principal-branch continuation ``f(z)`` for ``Im z >= 0``, ``z != 0``."""
        return np.exp(self.complex_log_value(z))

    def complex_log_value(self, z):
        """A logarithm of :meth:`complex_value`, finite where ``f(z)`` itself overflows."""
        z = np.asarray(z, dtype=complex)
        lz = np.log(z)
        acc = math.log(self.scale) + self.gamma * lz
        for a in self.alphas:
            acc = acc + _log_e_complex(a, lz)
        for b in self.betas:
            acc = acc - _log_e_complex(b, lz)
        return acc

    def folded(self) -> "RatioFunction":
        """Move negative exponents into ``gamma`` so all remaining ones are ``>= 0``.

        Uses ``E(c, x) = t**c E(-c, x)``; the function is unchanged.
        """
        g = self.gamma
        al, be = [], []
        for a in self.alphas:
            if a < 0:
                g += a
            al.append(abs(a))
        for b in self.betas:
            if b < 0:
                g -= b
            be.append(abs(b))
        return RatioFunction(g, al, be, self.scale)

    def to_scaled_spec(self) -> ScaledSpec | None:
        """Positive-exponent rewrite as ``scale * ExponentSpec``; ``None`` if a log factor remains."""
        f = self.folded()
        spec = cancel_common_factors(ExponentSpec(f.gamma, f.alphas, f.betas))
        if any(c == 0 for c in spec.alphas + spec.betas):
            return None
        const = f.scale * math.prod(b / a for a, b in zip(spec.alphas, spec.betas))
        return ScaledSpec(const, spec)


def as_ratio(obj) -> RatioFunction:
    """Coerce an :class:`ExponentSpec`, :class:`ScaledSpec` or :class:`RatioFunction`."""
    if isinstance(obj, RatioFunction):
        return obj
    if isinstance(obj, ScaledSpec):
        base = as_ratio(obj.spec)
        return RatioFunction(base.gamma, base.alphas, base.betas, base.scale * obj.scale)
    if isinstance(obj, ExponentSpec):
        scale = math.prod(a / b for a, b in zip(obj.alphas, obj.betas))
        return RatioFunction(obj.gamma, obj.alphas, obj.betas, scale)
    raise TypeError(f"cannot evaluate object of type {type(obj).__name__}")
