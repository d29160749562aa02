"""The one-variable reduction over the dilation family.

Restricting the two-ball problem to ``U_+- = c_+- v(x / R_+-)`` with ``v`` the
single-ball ground state leaves one free variable, the volume asymmetry
``y = 2 R_+^n / C - 1``.  The resulting functional

    F(y) = [(1+y)^a + (1-y)^a] / [(1+y)^b + (1-y)^b]^(p/q),
    a = 1 - p/n - p/(r-1),   b = 1 - q/(r-1),

is even in ``y`` and blows up as ``|y| -> 1`` like ``(1 - |y|)^e`` with
``e = a - min(b, 0) p/q < 0``.  Near the critical exponent ``e`` is close to
zero and the blow-up is invisible at any representable distance from 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .golden import golden_section
from .params import ProblemParams, gamma_coeff, q_hat

ASYMMETRY_THRESHOLD = 1e-6


def _exponents(params: ProblemParams) -> tuple[float, float, float]:
    n, p, q, r = params.n, params.p, params.q, params.r
    return 1 - p / n - p / (r - 1), 1 - q / (r - 1), p / q


def reduced_F(y, params: ProblemParams):
    """Evaluate F at ``y`` (scalar or array), ``|y| < 1``."""
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) >= 1):
        raise ValueError("reduced_F needs |y| < 1")
    a, b, s = _exponents(params)
    lp, lm = np.log1p(y), np.log1p(-y)
    # log-sum-exp: the powers overflow long before F does
    with np.errstate(over="ignore"):
        out = np.exp(np.logaddexp(a * lp, a * lm) - s * np.logaddexp(b * lp, b * lm))
    return float(out) if out.ndim == 0 else out


def blow_up_exponent(params: ProblemParams) -> float:
    """Exponent ``e`` in ``F(y) ~ const * (1 - y)^e`` as ``y -> 1``."""
    a, b, s = _exponents(params)
    return a - min(b, 0.0) * s


def second_derivative_at_zero(params: ProblemParams) -> float:
    """Closed-form ``F''(0) = 2^(1-p/q) * gamma``."""
    return 2 ** (1 - params.p / params.q) * gamma_coeff(params)


def fd_second_derivative_at_zero(params: ProblemParams, h: float = 1e-3) -> float:
    """Richardson-extrapolated central second difference of F at 0 (steps h, h/2)."""
    f0 = reduced_F(0.0, params)

    def d2(k):
        return (reduced_F(k, params) - 2 * f0 + reduced_F(-k, params)) / (k * k)

    return (4 * d2(h / 2) - d2(h)) / 3


@dataclass(frozen=True)
class ReducedMinimum:
    y_star: float
    F_star: float
    is_symmetric: bool
    tol: float
    converged: bool = True


def _scan_grid(n_uniform: int) -> np.ndarray:
    uniform = np.linspace(0.0, 0.999, n_uniform)
    tail = 1 - np.geomspace(1e-3, 1e-12, 64)[1:]
    return np.concatenate([uniform, tail])


def minimize_reduced_F(params: ProblemParams, tol: float = 1e-10, scan_points: int = 1024) -> ReducedMinimum:
    """Global minimum of F on [0, 1): grid scan, then golden-section refinement.

    A double well can appear past the transition, so the scan comes first.
    The symmetric point wins ties, which keeps round-off from faking asymmetry.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if scan_points < 512:
        raise ValueError("scan_points must be >= 512")
    params.require_admissible()
    grid = _scan_grid(scan_points)
    vals = reduced_F(grid, params)
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    res = golden_section(lambda y: reduced_F(y, params), lo, hi, tol=tol)
    y_star, f_star = res.x, res.fx
    if vals[k] < f_star:
        y_star, f_star = float(grid[k]), float(vals[k])
    f0 = float(vals[0])
    if f_star >= f0 * (1 - 8 * np.finfo(float).eps):
        y_star, f_star = 0.0, f0
    return ReducedMinimum(y_star=float(y_star), F_star=float(f_star),
                          is_symmetric=bool(y_star < max(10 * tol, ASYMMETRY_THRESHOLD)),
                          tol=tol, converged=bool(res.converged))


@dataclass(frozen=True)
class RestrictedThreshold:
    q_c: float
    uncertainty: float
    q_hat: float
    subcritical: bool


def restricted_threshold(p: float, r: float, n: int, q_bracket: tuple[float, float],
                         tol_q: float = 1e-6) -> RestrictedThreshold:
    """Bisect for the smallest q at which the reduced minimizer leaves y = 0.

    ``subcritical`` is set when the onset lies clearly below ``q_hat``, that is,
    when a separate asymmetric well wins before the symmetric point loses
    convexity.
    """
    lo, hi = q_bracket

    def asym(q):
        return not minimize_reduced_F(ProblemParams(n, p, q, r)).is_symmetric

    if asym(lo) or not asym(hi):
        raise ValueError(f"bracket {q_bracket} does not straddle the transition")
    while hi - lo > tol_q:
        mid = 0.5 * (lo + hi)
        if asym(mid):
            hi = mid
        else:
            lo = mid
    qh = q_hat(p, r, n)
    q_c = 0.5 * (lo + hi)
    return RestrictedThreshold(q_c=q_c, uncertainty=0.5 * (hi - lo), q_hat=qh,
                               subcritical=q_c < qh - max(10 * tol_q, 1e-6))


@dataclass(frozen=True)
class ReducedSweepPoint:
    q: float
    y_star: float
    F_star: float
    error: str | None = None


def sweep_reduced(n: int, p: float, r: float, q_values: Sequence[float], tol: float = 1e-10) -> list[ReducedSweepPoint]:
    out = []
    for q in q_values:
        try:
            m = minimize_reduced_F(ProblemParams(n, p, q, r), tol=tol)
            out.append(ReducedSweepPoint(q, m.y_star, m.F_star))
        except (ValueError, ArithmeticError) as exc:
            out.append(ReducedSweepPoint(q, math.nan, math.nan, error=str(exc)))
    return out
