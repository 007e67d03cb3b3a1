"""Loewner-matrix and matrix-pair oracles for operator monotonicity.

These checks never look at the analytic continuation; they evaluate ``f`` on
the positive axis only.  A function is operator monotone iff every Loewner
matrix ``[(f(t_i) - f(t_j)) / (t_i - t_j)]`` (``f'`` on the diagonal) is
positive semidefinite, so a negative eigenvalue is a certificate of failure
while the absence of one is merely evidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .exponents import ExponentSpec, LoewnerWitness
from .ratio import RatioFunction, as_ratio

__all__ = [
    "EvalOptions",
    "LoewnerReport",
    "MatrixProbeReport",
    "SearchBudget",
    "eval_f",
    "eval_f_prime",
    "loewner_matrix",
    "loewner_test",
    "matrix_function",
    "matrix_pair_probe",
    "witness_search",
    "chebyshev_points",
]

DEFAULT_PSD_TOL = 1e-8
DEFAULT_PROBE_TOL = 1e-9
# below this relative gap the divided difference is replaced by f' at the midpoint;
# the switch costs O(gap^2) truncation against O(eps / gap) cancellation
COINCIDENT_RTOL = 1e-5


@dataclass(frozen=True)
class EvalOptions:
    """Evaluate ``f(t)**power_s``; ``|t - 1| <= near_one_guard`` snaps to ``f(1)``."""

    power_s: float = 1.0
    near_one_guard: float = 0.0

    def __post_init__(self):
        if not self.power_s > 0:
            raise ValueError(f"power_s must be positive, got {self.power_s}")
        if self.near_one_guard < 0:
            raise ValueError("near_one_guard must be non-negative")


_DEFAULT_OPTS = EvalOptions()


def _ratio(func) -> RatioFunction:
    if isinstance(func, ExponentSpec):
        bad = [c for c in func.alphas + func.betas if not c > 0]
        if bad:
            raise ValueError(f"exponents must be positive, got {bad}")
    return as_ratio(func)


def _guarded(t, opts: EvalOptions):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("t must be positive")
    if opts.near_one_guard > 0:
        t = np.where(np.abs(t - 1.0) <= opts.near_one_guard, 1.0, t)
    return t


def eval_f(func, t, opts: EvalOptions | None = None):
    """``f(t)**s``; exact ``(prod alpha/beta)**s`` at ``t = 1``."""
    opts = opts or _DEFAULT_OPTS
    t = _guarded(t, opts)
    out = _ratio(func).value(t, opts.power_s)
    return float(out) if out.ndim == 0 else out


def eval_f_prime(func, t, opts: EvalOptions | None = None):
    """``d/dt f(t)**s`` via the pole-free logarithmic derivative.

    At ``t = 1`` this is ``s f(1)**s (gamma + sum(alpha - beta) / 2)``.
    """
    opts = opts or _DEFAULT_OPTS
    t = _guarded(t, opts)
    out = _ratio(func).derivative(t, opts.power_s)
    return float(out) if out.ndim == 0 else out


def chebyshev_points(n: int, lo: float = 0.1, hi: float = 10.0) -> np.ndarray:
    """Chebyshev nodes in ``log t`` mapped back to ``[lo, hi]``, ascending."""
    k = np.arange(n)
    u = np.cos((2 * k + 1) * np.pi / (2 * n))[::-1]
    a, b = math.log(lo), math.log(hi)
    return np.exp(0.5 * (a + b) + 0.5 * (b - a) * u)


def loewner_matrix(func, points, opts: EvalOptions | None = None) -> np.ndarray:
    opts = opts or _DEFAULT_OPTS
    rf = _ratio(func)
    t = np.asarray(points, dtype=float)
    fv = rf.value(t, opts.power_s)
    fp = opts.power_s * fv * rf.log_derivative(t)
    dt = t[:, None] - t[None, :]
    near = np.abs(dt) < COINCIDENT_RTOL * np.maximum(t[:, None], t[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        L = (fv[:, None] - fv[None, :]) / dt
    if np.any(near):
        mid = 0.5 * (t[:, None] + t[None, :])
        L = np.where(near, rf.derivative(mid, opts.power_s), L)
    np.fill_diagonal(L, fp)
    return 0.5 * (L + L.T)


@dataclass
class LoewnerReport:
    points: tuple[float, ...]
    matrix: np.ndarray
    min_eigenvalue: float
    psd: bool
    tolerance: float
    norm_estimate: float

    @property
    def relative_min_eigenvalue(self) -> float:
        return self.min_eigenvalue / max(1.0, self.norm_estimate)


def _min_eig(L: np.ndarray) -> tuple[float, float]:
    norm = float(np.max(np.sum(np.abs(L), axis=1)))
    return float(np.linalg.eigvalsh(L)[0]), norm


def loewner_test(
    func, points, opts: EvalOptions | None = None, tolerance: float = DEFAULT_PSD_TOL
) -> LoewnerReport:
    """Build the Loewner matrix at ``points`` and test it for PSD.

    ``psd`` holds when the smallest eigenvalue is at least
    ``-tolerance * max(1, norm)``, with ``norm`` the max absolute row sum.
    """
    t = np.sort(np.asarray(points, dtype=float))
    if t.size < 2:
        raise ValueError("need at least two points")
    if np.any(~(t > 0)):
        raise ValueError("points must be positive")
    if np.any(np.diff(t) == 0):
        raise ValueError("points must be distinct")
    L = loewner_matrix(func, t, opts)
    lam, norm = _min_eig(L)
    psd = lam >= -tolerance * max(1.0, norm)
    return LoewnerReport(tuple(t.tolist()), L, lam, bool(psd), tolerance, norm)


def matrix_function(func, X: np.ndarray, opts: EvalOptions | None = None) -> np.ndarray:
    """``f(X)`` for symmetric positive definite ``X`` by eigendecomposition."""
    opts = opts or _DEFAULT_OPTS
    w, V = np.linalg.eigh(X)
    fw = _ratio(func).value(w, opts.power_s)
    return (V * fw) @ V.T


@dataclass
class MatrixProbeReport:
    dimension: int
    trials: int
    seed: int
    violations: int
    worst_min_eigenvalue: float
    tolerance: float
    witness: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)


def _random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def _probe_pair(rng: np.random.Generator, d: int) -> tuple[np.ndarray, np.ndarray]:
    lam = np.exp(rng.uniform(math.log(0.1), math.log(10.0), d))
    Q = _random_orthogonal(rng, d)
    A = (Q * lam) @ Q.T
    k = int(rng.integers(1, d + 1))
    G = rng.standard_normal((d, k))
    P = G @ G.T
    P *= rng.uniform(0.0, 5.0) / np.linalg.norm(P, 2)
    A = 0.5 * (A + A.T)
    B = A + 0.5 * (P + P.T)
    return A, B


def matrix_pair_probe(
    func,
    dimension: int = 3,
    trials: int = 100,
    seed: int = 0,
    opts: EvalOptions | None = None,
    tolerance: float = DEFAULT_PROBE_TOL,
) -> MatrixProbeReport:
    """Draw ``A <= B`` at random and look for ``f(B) - f(A)`` with a negative eigenvalue.

    ``A`` has log-uniform spectrum in ``[0.1, 10]`` under a random rotation and
    ``B = A + P`` with ``P`` a random Gram matrix of spectral norm in
    ``[0, 5]``.  Trial ``i`` draws from ``default_rng([seed, i])``, so the
    report depends only on ``(seed, trials, dimension)``.  A trial counts as a
    violation when ``lambda_min(f(B) - f(A)) < -tolerance * max(1, ||f(B)||)``.
    """
    if not 2 <= dimension <= 12:
        raise ValueError(f"dimension must lie in [2, 12], got {dimension}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    violations = 0
    worst = math.inf
    worst_rel = math.inf
    witness = None
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        A, B = _probe_pair(rng, dimension)
        fA = matrix_function(func, A, opts)
        fB = matrix_function(func, B, opts)
        D = fB - fA
        lam = float(np.linalg.eigvalsh(0.5 * (D + D.T))[0])
        scale = max(1.0, float(np.linalg.norm(fB, 2)))
        worst = min(worst, lam)
        if lam < -tolerance * scale:
            violations += 1
            if lam / scale < worst_rel:
                worst_rel = lam / scale
                witness = (A, B)
    return MatrixProbeReport(dimension, trials, seed, violations, worst, tolerance, witness)


@dataclass(frozen=True)
class SearchBudget:
    """Limits for :func:`witness_search`."""

    max_points: int = 8
    restarts: int = 200
    refine_starts: int = 4
    refine_iters: int = 400
    log10_range: tuple[float, float] = (-6.0, 6.0)
    seed: int = 0


def witness_search(
    func,
    budget: SearchBudget | None = None,
    opts: EvalOptions | None = None,
    tolerance: float = DEFAULT_PSD_TOL,
) -> LoewnerWitness | None:
    """Look for a Loewner point set with ``lambda_min < -10 * tolerance * max(1, norm)``.

    Candidates come from a few canonical sets, geometric progressions over a
    grid of centres and ratios, and random log-uniform sets; the most
    negative ones are then polished by Nelder-Mead on the log-points.  The
    first candidate past the threshold is returned; ``None`` means nothing was
    found within the budget, which says nothing about monotonicity.
    """
    budget = budget or SearchBudget()
    opts = opts or _DEFAULT_OPTS
    rf = _ratio(func)
    lo, hi = budget.log10_range
    threshold = -10.0 * tolerance

    def score(x10: np.ndarray) -> tuple[float, float]:
        t = 10.0 ** np.clip(x10, lo - 6, hi + 6)
        L = loewner_matrix(rf, t, opts)
        if not np.all(np.isfinite(L)):
            return math.inf, math.nan
        lam, norm = _min_eig(L)
        return lam / max(1.0, norm), lam

    def as_witness(x10, lam, rel):
        pts = tuple(float(p) for p in np.sort(10.0 ** np.asarray(x10)))
        return LoewnerWitness(points=pts, min_eigenvalue=lam, violation=-rel)

    candidates: list[np.ndarray] = [np.log10([1.0, 2.0]), np.log10([0.5, 1.0, 2.0])]
    for c in np.linspace(lo, hi, 25):
        for q in (0.2, 0.5, 1.0, 2.0):
            for m in (2, 3, 5, budget.max_points):
                candidates.append(c + q * (np.arange(m) - (m - 1) / 2))
    rng = np.random.default_rng(budget.seed)
    for _ in range(budget.restarts):
        m = int(rng.integers(2, budget.max_points + 1))
        candidates.append(np.sort(rng.uniform(lo, hi, m)))

    scored = []
    for x in candidates:
        rel, lam = score(x)
        if rel < threshold:
            return as_witness(x, lam, rel)
        scored.append((rel, len(scored)))
    scored.sort()
    for rel0, idx in scored[: budget.refine_starts]:
        x0 = candidates[idx]
        res = minimize(
            lambda x: score(x)[0],
            x0,
            method="Nelder-Mead",
            options={"maxiter": budget.refine_iters, "xatol": 1e-8, "fatol": 1e-14},
        )
        rel, lam = score(res.x)
        if rel < threshold:
            return as_witness(res.x, lam, rel)
    return None
